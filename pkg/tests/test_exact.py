import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qcorr.exact import (
    EQ, GE, LE, Constraint, LPProblem, LPStatus, as_rational, format_rational, linear_solve, lp_solve,
    verify_farkas,
)
from qcorr.kernels import available_backends

BACKENDS = available_backends()


def test_as_rational_accepts_exact_inputs():
    assert as_rational("3/4") == F(3, 4)
    assert as_rational("-900") == -900
    assert as_rational("0.25") == F(1, 4)
    assert as_rational(F(6, 8)).denominator == 4


@pytest.mark.parametrize("bad", [0.5, True, None, "x", "1/0"])
def test_as_rational_rejects(bad):
    with pytest.raises((TypeError, ValueError)):
        as_rational(bad)


def test_format_rational():
    assert format_rational(F(8)) == "8"
    assert format_rational(F(-891, 4)) == "-891/4"


@given(st.fractions(), st.fractions())
def test_lowest_terms(a, b):
    for r in (a + b, a * b, a - b):
        assert r.denominator > 0
        assert F(r.numerator, r.denominator) == r
        from math import gcd
        assert gcd(r.numerator, r.denominator) == 1


def test_linear_solve_unique():
    s = linear_solve([[1, 0], [0, 1]], [F(1, 2), F(1, 3)])
    assert s.kind == "unique" and s.particular == (F(1, 2), F(1, 3))


def test_linear_solve_parametric():
    s = linear_solve([[1, 1], [2, 2]], [1, 2])
    assert s.kind == "parametric"
    assert s.particular == (1, 0)
    assert s.null_basis == ((-1, 1),) or s.null_basis == ((1, -1),)
    assert s.null_basis[0][0] > 0


def test_linear_solve_inconsistent():
    assert linear_solve([[1, 1], [1, 1]], [1, 2]).kind == "inconsistent"


def test_linear_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        linear_solve([[1, 1]], [1, 2])


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=4),
    st.lists(small, min_size=n, max_size=n))))
def test_linear_solve_solutions_satisfy_system(data):
    A, x0 = data
    b = [sum(a * x for a, x in zip(row, x0)) for row in A]
    s = linear_solve(A, b)
    assert s.consistent
    for t in ([0] * len(s.null_basis), [1] * len(s.null_basis), list(range(len(s.null_basis)))):
        x = [p + sum(tk * v[j] for tk, v in zip(t, s.null_basis)) for j, p in enumerate(s.particular)]
        assert [sum(a * xi for a, xi in zip(row, x)) for row in A] == b


@pytest.mark.parametrize("backend", BACKENDS)
def test_lp_trivial(backend):
    p = LPProblem((1,), (Constraint((1,), LE, 1),), ((0, None),))
    out = lp_solve(p, "max", backend=backend)
    assert out.status is LPStatus.OPTIMAL and out.value == 1 and out.x == (1,)


@pytest.mark.parametrize("backend", BACKENDS)
def test_lp_infeasible_certificate(backend):
    p = LPProblem((1,), (Constraint((1,), LE, 0), Constraint((1,), GE, 1)))
    out = lp_solve(p, backend=backend)
    assert out.infeasible
    assert verify_farkas(p, out.certificate)


@pytest.mark.parametrize("backend", BACKENDS)
def test_lp_unbounded(backend):
    p = LPProblem.nonnegative((1, 1), (Constraint((1, -1), LE, 1),))
    assert lp_solve(p, backend=backend).status is LPStatus.UNBOUNDED


def test_lp_min_and_free_variables():
    # min |x - 3| style: min t s.t. t >= x - 3, t >= 3 - x, x free
    p = LPProblem((0, 1), (Constraint((-1, 1), GE, -3), Constraint((1, 1), GE, 3)))
    out = lp_solve(p, "min")
    assert out.value == 0 and out.x[1] == 0


def test_lp_upper_only_and_boxed():
    p = LPProblem((1, -1), (Constraint((1, 1), LE, 10),), ((None, 4), (F(-1, 2), 7)))
    out = lp_solve(p, "max")
    assert out.value == F(9, 2) and out.x == (4, F(-1, 2))


def test_lp_no_rows():
    out = lp_solve(LPProblem((1, 2), (), ((0, 1), (0, 3))), "max")
    assert out.value == 7


def test_bad_sense():
    with pytest.raises(ValueError):
        lp_solve(LPProblem((1,)), "up")


def test_lp_constraint_length_checked():
    with pytest.raises(ValueError):
        LPProblem((1, 2), (Constraint((1,), LE, 0),))


# ---------------------------------------------------------------- oracles


def vertex_oracle(problem: LPProblem):
    """Best objective over all basic feasible points (bounded problems)."""
    rows = problem.certificate_rows()
    n = problem.num_vars
    best = None
    for combo in itertools.combinations(rows, n):
        s = linear_solve([r.coeffs for r in combo], [r.rhs for r in combo])
        if s.kind != "unique":
            continue
        x = s.particular
        if problem.is_feasible_point(x):
            v = sum(c * xi for c, xi in zip(problem.objective, x))
            best = v if best is None else max(best, v)
    return best


coef = st.integers(-4, 4).map(F)
rel = st.sampled_from([LE, GE, EQ])


@st.composite
def boxed_lps(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(0, 4))
    cons = [Constraint(tuple(draw(coef) for _ in range(n)), draw(st.sampled_from([LE, LE, GE, EQ])),
                       F(draw(st.integers(-6, 6)))) for _ in range(m)]
    bounds = []
    for _ in range(n):
        lo = draw(st.integers(-3, 1))
        bounds.append((F(lo), F(lo + draw(st.integers(0, 5)))))
    return LPProblem(tuple(draw(coef) for _ in range(n)), tuple(cons), tuple(bounds))


@given(boxed_lps(), st.sampled_from(["hybrid", "bland"]))
def test_lp_matches_vertex_oracle(problem, rule):
    out = lp_solve(problem, "max", rule=rule)
    want = vertex_oracle(problem)
    if want is None:
        assert out.infeasible
        assert verify_farkas(problem, out.certificate)
    else:
        assert out.optimal and out.value == want
        assert problem.is_feasible_point(out.x)


@given(boxed_lps())
def test_backends_agree(problem):
    outs = [lp_solve(problem, "max", backend=b) for b in BACKENDS]
    first = outs[0]
    for o in outs[1:]:
        assert (o.status, o.value, o.x, o.certificate, o.pivots) == \
               (first.status, first.value, first.x, first.certificate, first.pivots)


@given(boxed_lps())
def test_min_is_negated_max(problem):
    mx = lp_solve(problem, "max")
    neg = LPProblem(tuple(-c for c in problem.objective), problem.constraints, problem.bounds)
    mn = lp_solve(neg, "min")
    assert mx.status == mn.status
    if mx.optimal:
        assert mn.value == -mx.value


@given(st.lists(st.tuples(coef, coef, st.integers(-5, 5)), min_size=2, max_size=5))
def test_every_infeasible_certificate_verifies(rows):
    cons = tuple(Constraint((a, b), LE, F(c)) for a, b, c in rows) + (Constraint((1, 1), GE, 20),)
    p = LPProblem.nonnegative((0, 0), cons)
    out = lp_solve(p)
    if out.infeasible:
        assert verify_farkas(p, out.certificate)
        # recombination: sum y*a == 0 and sum y*b < 0
        combo = [sum(y * r.coeffs[j] for y, r in zip(out.certificate, p.certificate_rows())) for j in range(2)]
        assert combo == [0, 0]
    else:
        assert p.is_feasible_point(out.x)
