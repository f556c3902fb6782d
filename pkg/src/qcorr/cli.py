"""``qcorr`` command line: nash, ce, qce-verify, lhv, chsh, demo.

Exit codes: 0 success, 1 an ``--expect`` check (or a demo check) failed,
2 input error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__
from .bell import (
    AgreementTable, classical_payoff_bound, chsh_value, deterministic_chsh_values, lhv_feasible,
    max_classical_agreement, standard_chsh_axes, planar_direction,
)
from .correlated import optimal_ce
from .exact import as_rational, format_rational
from .gamefile import GameFile, GameFileError, load
from .games import EXAMPLE_PURE_PROFILES, GameError, agent_form, build_example_game
from .nash import enumerate_nash, enumerate_pure_nash
from .qce import (
    QCESetup, Verdict, agent_payoff, agreement_table, build_example_qce, expected_payoff_qce, verify_qce,
    AgentStrategy,
)
from .quantum import QuantumError, singlet

EXIT_OK, EXIT_EXPECT, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# ------------------------------------------------------------------ formatting


def fmt(v: Any) -> Any:
    """Canonical report value: exact numbers as ``p/q``, floats to 12 significant digits."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, dict):
        return {str(k): fmt(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [fmt(x) for x in v]
    return str(v)


def _text(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, list):
        return "(" + ", ".join(_text(x) for x in v) + ")"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_text(x)}" for k, x in v.items()) + "}"
    return str(v)


def render_text(report: dict, out) -> None:
    print(f"# {report['command']}", file=out)
    for k, v in report["results"].items():
        if isinstance(v, dict):
            print(f"{k}:", file=out)
            for k2, v2 in v.items():
                print(f"  {k2}: {_text(v2)}", file=out)
        elif isinstance(v, list) and v and isinstance(v[0], (list, dict)):
            print(f"{k}:", file=out)
            for item in v:
                if isinstance(item, dict):
                    print("  - " + ", ".join(f"{a}: {_text(b)}" for a, b in item.items()), file=out)
                else:
                    print(f"  - {_text(item)}", file=out)
        else:
            print(f"{k}: {_text(v)}", file=out)


def make_report(command: str, results: dict) -> dict:
    return {"command": command, "results": fmt(results)}


def _check_expectations(report: dict, expects: Sequence[str]) -> list[str]:
    """``--expect key=value``; nested keys use dots, values compare as rendered text."""
    failures = []
    for e in expects:
        if "=" not in e:
            raise InputError(f"--expect needs key=value, got {e!r}")
        key, want = e.split("=", 1)
        node: Any = report["results"]
        for part in key.split("."):
            if isinstance(node, dict) and part in node:
                node = node[part]
            else:
                raise InputError(f"--expect: report has no field {key!r}")
        got = _text(node)
        if got.replace(" ", "") != want.replace(" ", ""):
            failures.append(f"expected {key}={want}, got {got}")
    return failures


# ------------------------------------------------------------------ commands


def _load(path: str) -> GameFile:
    try:
        return load(path)
    except GameFileError as e:
        raise InputError(str(e)) from None


def _profile_text(af, profile) -> str:
    parts = []
    for k, dist in enumerate(profile.strategies):
        names = af.game.action_labels[k]
        if profile.is_pure:
            parts.append(f"{af.game.players[k]}={names[dist.index(1)]}")
        else:
            parts.append(f"{af.game.players[k]}=" + "/".join(format_rational(p) for p in dist))
    return " ".join(parts)


def cmd_nash(args) -> dict:
    gf = _load(args.game)
    af = agent_form(gf.game)
    pure = enumerate_pure_nash(af.game)
    res: dict = {"pure": len(pure)}
    if not args.pure_only:
        try:
            eq = enumerate_nash(af)
        except GameError as e:
            raise InputError(str(e)) from None
        t = eq.tallies()
        res.update(total=t["isolated"], isolated=t["isolated"], components=t["components"],
                   isolated_plus_components=t["isolated_plus_components"], regimes=t["regimes"])
        if eq.components:
            res["note"] = (f"{len(eq.components)} positive-dimensional component(s) found; "
                           f"'total' counts isolated equilibria only")
        if args.list:
            res["equilibria"] = [
                {"profile": _profile_text(af, p), "payoffs": list(af.player_payoffs(p))} for p in eq.isolated
            ]
    elif args.list:
        res["equilibria"] = [
            {"profile": " ".join(f"{af.game.players[k]}={af.game.action_labels[k][x]}" for k, x in enumerate(a)),
             "payoffs": list(af.player_payoffs_pure(a))} for a in pure
        ]
    return make_report("nash", res)


def _parse_weights(text: str) -> list[Fraction]:
    try:
        return [as_rational(x.strip()) for x in text.split(",")]
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError(f"bad --weights {text!r}; expected comma-separated rationals") from None


def cmd_ce(args) -> dict:
    gf = _load(args.game)
    af = agent_form(gf.game)
    n = gf.game.num_players
    if args.weights is None:
        weights = [Fraction(1)] * n
        note = "weights not given; defaulting to all ones"
    else:
        weights = _parse_weights(args.weights)
        note = None
        if len(weights) != n:
            raise InputError(f"--weights needs {n} values, one per player")
    res = optimal_ce(af, weights)
    dist = []
    for a, p in res.distribution.probs.items():
        acts = " ".join(f"{af.game.players[k]}={af.game.action_labels[k][x]}" for k, x in enumerate(a))
        dist.append({"actions": acts, "probability": p})
    out: dict = {"weights": weights}
    if note:
        out["note"] = note
    out.update(value=res.value, payoffs=list(res.payoffs), distribution=dist)
    return make_report("ce", out)


def _strategy_text(setup: QCESetup, i: int, s: AgentStrategy) -> str:
    g = setup.game
    m = setup.menus[i][s.measurement].label or str(s.measurement)
    return f"measure {m}, up->{g.action_labels[i][s.policy[0]]}, down->{g.action_labels[i][s.policy[1]]}"


def cmd_qce_verify(args) -> dict:
    gf = _load(args.game)
    if gf.setup is None or gf.profile is None:
        raise InputError(f"{args.game}: qce-verify needs 'quantum' and 'profile' sections")
    if args.tolerance < 0:
        raise InputError("--tolerance must be nonnegative")
    setup = gf.setup.rationalized() if args.exact else gf.setup
    rep = verify_qce(setup, gf.profile, args.tolerance)
    g = setup.game
    c = min(rep.agents, key=lambda a: a.gap)
    res = {
        "payoffs": list(rep.payoffs),
        "verdict": rep.verdict.value,
        "margin": rep.margin,
        "deviations_evaluated": rep.deviations_evaluated,
        "tolerance": rep.tolerance,
        "exact": setup.exact,
        "witness": {
            "agent": f"{g.players[c.player]}:{g.type_labels[c.player][c.type]}",
            "deviation": _strategy_text(setup, c.player, c.best_deviation),
            "payoff": c.payoff,
            "deviation_payoff": c.best_deviation_payoff,
            "gap": c.gap,
        },
    }
    return make_report("qce-verify", res)


def _read_table(arg: str) -> AgreementTable:
    if os.path.exists(arg):
        gf = _load(arg)
        if gf.table is None:
            raise InputError(f"{arg}: no 'agreement_table' section")
        return gf.table
    try:
        return AgreementTable.parse(arg)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise InputError(f"bad agreement table {arg!r}: {e}") from None


def cmd_lhv(args) -> dict:
    table = _read_table(args.table)
    r = lhv_feasible(table)
    if r.feasible:
        model = [{"f": "".join(map(str, f)), "g": "".join(map(str, g)), "weight": p}
                 for (f, g), p in r.model.weights.items()]
        res = {"status": "FEASIBLE", "model": model}
    else:
        res = {"status": "INFEASIBLE", "inequality": str(r.inequality), "table_value": r.violation}
    return make_report("lhv", res)


def cmd_chsh(args) -> dict:
    if args.angles:
        try:
            deg = [float(x) for x in args.angles.split(",")]
        except ValueError:
            raise InputError("--angles needs four comma-separated degrees") from None
        if len(deg) != 4:
            raise InputError("--angles needs four comma-separated degrees")
        axes = (planar_direction(deg[0], 0, "a"), planar_direction(deg[1], 0, "a'"), planar_direction(deg[2], 1, "b"), planar_direction(deg[3], 1, "b'"))
    else:
        axes = standard_chsh_axes()
    s = chsh_value(singlet(), *axes)
    det = deterministic_chsh_values()
    res = {"S": s, "abs_S": abs(s), "tsirelson": 2 * math.sqrt(2),
           "classical_max": max(abs(v) for v in det), "deterministic_assignments": len(det)}
    return make_report("chsh", res)


# ------------------------------------------------------------------ demo


def _demo_checks() -> list[dict]:
    checks = []

    def check(name, ok, got, expected, seconds):
        checks.append({"check": name, "ok": bool(ok), "got": got, "expected": expected,
                       "seconds": round(seconds, 3)})

    bg = build_example_game()
    af = agent_form(bg)

    t = time.perf_counter()
    pure = enumerate_pure_nash(af.game)
    want = sorted(af.behavioral(b) for b in EXAMPLE_PURE_PROFILES.values())
    check("pure Nash count", len(pure) == 8 and sorted(pure) == want, len(pure), 8, time.perf_counter() - t)

    t = time.perf_counter()
    eq = enumerate_nash(af)
    tal = eq.tallies()
    got = f"isolated {tal['isolated']}, components {tal['components']}"
    check("total Nash count", tal["isolated"] == 175 and not eq.components, got, "isolated 175",
          time.perf_counter() - t)

    t = time.perf_counter()
    ce = optimal_ce(af, (1, 1))
    check("optimal CE", ce.value == 8 and ce.payoffs == (4, 4), [ce.value, list(ce.payoffs)], [8, [4, 4]],
          time.perf_counter() - t)

    t = time.perf_counter()
    setup, prof = build_example_qce()
    tab = agreement_table(setup, prof)
    ok = all(abs(tab[i][j] - (0 if i == j else 0.75)) <= 1e-9 for i in range(3) for j in range(3))
    check("quantum agreement table", ok, [[float(x) for x in r] for r in tab], "diag 0, off-diag 3/4",
          time.perf_counter() - t)

    t = time.perf_counter()
    pay = expected_payoff_qce(setup, prof)
    check("quantum payoff", all(abs(p - 4.5) <= 1e-9 for p in pay), list(pay), [4.5, 4.5], time.perf_counter() - t)

    t = time.perf_counter()
    rep = verify_qce(setup, prof)
    dev = agent_payoff(setup, prof.replace(0, 0, AgentStrategy(1, prof.of(0, 0).policy)), 0, 0)
    ok = (rep.verdict is Verdict.STRICT and rep.margin > 0 and abs(dev + 222.75) <= 1e-6
          and rep.deviations_evaluated == 66)
    check("strict quantum equilibrium", ok,
          {"verdict": rep.verdict.value, "margin": rep.margin, "A->y": dev, "deviations": rep.deviations_evaluated},
          {"verdict": "StrictEquilibrium", "A->y": -222.75, "deviations": 66}, time.perf_counter() - t)

    t = time.perf_counter()
    lhv = lhv_feasible(example_agreement_table())
    mca = max_classical_agreement(0)
    bound = classical_payoff_bound(mca)
    ok = (not lhv.feasible and lhv.inequality.violated_by(example_agreement_table())
          and lhv.inequality.holds_for_all_deterministic() and mca == Fraction(2, 3) and bound == ce.payoffs[0])
    check("non-classicality", ok, {"lhv": "infeasible" if not lhv.feasible else "feasible",
                                   "max_agreement": mca, "payoff_bound": bound},
          {"lhv": "infeasible", "max_agreement": Fraction(2, 3), "payoff_bound": 4}, time.perf_counter() - t)

    t = time.perf_counter()
    s = chsh_value(singlet(), *standard_chsh_axes())
    det = max(abs(v) for v in deterministic_chsh_values())
    check("CHSH", abs(abs(s) - 2 * math.sqrt(2)) <= 1e-9 and det <= 2, {"abs_S": abs(s), "deterministic_max": det},
          {"abs_S": 2 * math.sqrt(2), "deterministic_max": 2}, time.perf_counter() - t)
    return checks


def example_agreement_table() -> AgreementTable:
    return AgreementTable.uniform(3, 0, Fraction(3, 4))


def cmd_demo(args) -> dict:
    checks = _demo_checks()
    res = {"passed": sum(c["ok"] for c in checks), "failed": sum(not c["ok"] for c in checks), "checks": checks}
    return make_report("demo", res)


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcorr", description="Nash, correlated and quantum correlated equilibria.")
    p.add_argument("--version", action="version", version=f"qcorr {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the machine-readable report")
    common.add_argument("--expect", action="append", default=[], metavar="KEY=VALUE",
                        help="exit 1 unless the report field matches (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nash", parents=[common], help="count pure and mixed Nash equilibria")
    s.add_argument("game")
    s.add_argument("--pure-only", action="store_true")
    s.add_argument("--list", action="store_true", help="list the equilibria found")
    s.set_defaults(fn=cmd_nash)

    s = sub.add_parser("ce", parents=[common], help="welfare-optimal correlated equilibrium")
    s.add_argument("game")
    s.add_argument("--weights", help="comma-separated per-player weights (default all ones)")
    s.set_defaults(fn=cmd_ce)

    s = sub.add_parser("qce-verify", parents=[common], help="verify a quantum correlated equilibrium")
    s.add_argument("game")
    s.add_argument("--tolerance", type=float, default=1e-6)
    s.add_argument("--exact", action="store_true", help="rationalize Born probabilities and compare exactly")
    s.set_defaults(fn=cmd_qce_verify)

    s = sub.add_parser("lhv", parents=[common], help="local-hidden-variable feasibility of an agreement table")
    s.add_argument("table", help='inline "0,3/4,3/4;3/4,0,3/4;3/4,3/4,0" or a game file with agreement_table')
    s.set_defaults(fn=cmd_lhv)

    s = sub.add_parser("chsh", parents=[common], help="CHSH value of the singlet")
    s.add_argument("--angles", help="a,a',b,b' in degrees (x-z plane); default 0,90,45,135")
    s.set_defaults(fn=cmd_chsh)

    s = sub.add_parser("demo", parents=[common], help="reproduce the worked example end to end")
    s.set_defaults(fn=cmd_demo)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.fn(args)
        failures = _check_expectations(report, args.expect)
    except (InputError, GameError, QuantumError) as e:
        print(f"qcorr: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        render_text(report, sys.stdout)
    for f in failures:
        print(f"qcorr: {f}", file=sys.stderr)
    if failures:
        return EXIT_EXPECT
    if args.command == "demo" and report["results"]["failed"]:
        return EXIT_EXPECT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
