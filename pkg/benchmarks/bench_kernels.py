"""Compare the GMP (Cython) and pure-Python simplex kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import statistics
import time
from fractions import Fraction as F

from qcorr.bell import AgreementTable, _lhv_problem
from qcorr.exact import EQ, LE, Constraint, LPProblem, lp_solve
from qcorr.games import agent_form, build_example_game
from qcorr.kernels import available_backends


def ce_problem():
    sg = agent_form(build_example_game()).game
    joints = list(sg.joint_actions())
    idx = {a: k for k, a in enumerate(joints)}
    cons = [Constraint((F(1),) * len(joints), EQ, F(1))]
    for i in range(sg.num_players):
        for r in range(2):
            row = [F(0)] * len(joints)
            for a in joints:
                if a[i] == r:
                    b = list(a)
                    b[i] = 1 - r
                    row[idx[a]] = sg.payoffs[tuple(b)][i] - sg.payoffs[a][i]
            cons.append(Constraint(tuple(row), LE, F(0)))
    return LPProblem.nonnegative([sum(sg.payoffs[a]) for a in joints], cons)


def random_dense(n=40, m=30, seed=7):
    rng = random.Random(seed)
    cons = [Constraint(tuple(F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)), LE,
                       F(rng.randint(1, 50))) for _ in range(m)]
    return LPProblem(tuple(F(rng.randint(-5, 9)) for _ in range(n)), tuple(cons), ((F(0), F(10)),) * n)


CASES = {
    "ce-lp (64 vars, 13 rows)": ce_problem,
    "lhv-lp (64 vars, 10 rows)": lambda: _lhv_problem(AgreementTable.uniform(3, 0, F(3, 4)))[0],
    "dense (40 vars, 30 rows, boxed)": random_dense,
}


def bench(problem, backend, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = lp_solve(problem, "max", backend=backend)
        times.append(time.perf_counter() - t)
    return statistics.median(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'case':34} " + " ".join(f"{b:>12}" for b in backends) + "   speedup  pivots")
    for name, make in CASES.items():
        p = make()
        res = {b: bench(p, b, args.repeat) for b in backends}
        outs = [o for _, o in res.values()]
        assert all((o.status, o.value, o.pivots) == (outs[0].status, outs[0].value, outs[0].pivots) for o in outs)
        cells = " ".join(f"{res[b][0] * 1e3:10.2f}ms" for b in backends)
        speed = f"{res['python'][0] / res['gmp'][0]:8.1f}x" if "gmp" in res else "       -"
        print(f"{name:34} {cells} {speed}  {outs[0].pivots:6d}")


if __name__ == "__main__":
    main()
