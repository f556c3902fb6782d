import json
import subprocess
import sys
from pathlib import Path

import pytest

from qcorr.cli import main

GAMES = Path(__file__).resolve().parent.parent / "games"
EXAMPLE = str(GAMES / "example.yaml")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)["results"]


def test_nash_counts(capsys):
    code, res = run_json(capsys, "nash", EXAMPLE)
    assert code == 0
    assert res["pure"] == 8 and res["components"] == 0 and res["total"] == res["isolated"] == 27


def test_nash_expect_mismatch_exits_1(capsys):
    code, _, err = run(capsys, "nash", EXAMPLE, "--expect", "total=175")
    assert code == 1 and "expected total=175, got 27" in err


def test_nash_pure_only_matching_pennies(capsys):
    code, out, _ = run(capsys, "nash", str(GAMES / "matching_pennies.yaml"), "--pure-only")
    assert code == 0 and "pure: 0" in out and "total" not in out


def test_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("players: [P1]\nactions: {P1: [x]}\npayoffs: {entries: [{actions: [q], payoff: [1]}]}\n")
    code, _, err = run(capsys, "nash", str(bad))
    assert code == 2 and f"{bad}:3:" in err


def test_ce(capsys):
    code, res = run_json(capsys, "ce", EXAMPLE, "--weights", "1,1")
    assert code == 0 and res["value"] == "8" and res["payoffs"] == ["4", "4"]
    code, res = run_json(capsys, "ce", EXAMPLE, "--weights", "0,0")
    assert res["value"] == "0"
    code, res = run_json(capsys, "ce", EXAMPLE)
    assert "default" in res["note"] and res["weights"] == ["1", "1"]


def test_ce_bad_weights(capsys):
    assert run(capsys, "ce", EXAMPLE, "--weights", "1")[0] == 2
    assert run(capsys, "ce", EXAMPLE, "--weights", "a,b")[0] == 2


def test_qce_verify(capsys):
    code, res = run_json(capsys, "qce-verify", EXAMPLE)
    assert code == 0
    assert res["payoffs"] == [4.5, 4.5] and res["verdict"] == "StrictEquilibrium"
    assert res["deviations_evaluated"] == 66
    code, out, _ = run(capsys, "qce-verify", EXAMPLE)
    assert "payoffs: (4.5, 4.5)" in out


def test_qce_verify_exact(capsys):
    code, res = run_json(capsys, "qce-verify", EXAMPLE, "--exact", "--tolerance", "0")
    assert res["payoffs"] == ["9/2", "9/2"] and res["margin"] == "303/4"


def test_qce_all_yes(capsys):
    code, res = run_json(capsys, "qce-verify", str(GAMES / "example_all_yes.yaml"))
    assert code == 0 and res["verdict"] == "NotEquilibrium" and res["payoffs"] == [-294, -294]
    assert res["witness"]["gap"] < 0


def test_qce_fallback_b(capsys):
    code, res = run_json(capsys, "qce-verify", str(GAMES / "example_fallback_b.yaml"))
    assert res["verdict"] != "NotEquilibrium" and res["payoffs"] == [4, 4]


def test_qce_requires_quantum(capsys):
    assert run(capsys, "qce-verify", str(GAMES / "matching_pennies.yaml"))[0] == 2


@pytest.mark.parametrize("table, status", [
    ("0,3/4,3/4;3/4,0,3/4;3/4,3/4,0", "INFEASIBLE"),
    ("1/2,1/2,1/2;1/2,1/2,1/2;1/2,1/2,1/2", "FEASIBLE"),
    ("0,2/3,2/3;2/3,0,2/3;2/3,2/3,0", "FEASIBLE"),
    (EXAMPLE, "INFEASIBLE"),
])
def test_lhv(capsys, table, status):
    code, res = run_json(capsys, "lhv", table)
    assert code == 0 and res["status"] == status


def test_lhv_bad_table(capsys):
    assert run(capsys, "lhv", "0,2;1")[0] == 2
    assert run(capsys, "lhv", "0,x;1,1")[0] == 2


def test_chsh(capsys):
    code, res = run_json(capsys, "chsh")
    assert code == 0 and abs(res["abs_S"] - 2.82842712475) < 1e-11 and res["classical_max"] == 2
    assert run(capsys, "chsh", "--angles", "0,0,0")[0] == 2


def test_text_and_json_agree(capsys):
    for argv in (["nash", EXAMPLE], ["ce", EXAMPLE], ["qce-verify", EXAMPLE], ["lhv", EXAMPLE], ["chsh"]):
        _, res = run_json(capsys, *argv)
        _, out, _ = run(capsys, *argv)
        for k, v in res.items():
            if isinstance(v, (str, int, float)) and not isinstance(v, bool):
                from qcorr.cli import _text
                assert f"{k}: {_text(v)}" in out


def test_reports_are_deterministic(capsys):
    a = run(capsys, "ce", EXAMPLE, "--json")[1]
    b = run(capsys, "ce", EXAMPLE, "--json")[1]
    assert a == b


def test_demo_json_matches_text(capsys):
    code_j, res = run_json(capsys, "demo")
    code_t, out, _ = run(capsys, "demo")
    assert code_j == code_t
    assert f"passed: {res['passed']}" in out and f"failed: {res['failed']}" in out
    by_name = {c["check"]: c["ok"] for c in res["checks"]}
    assert all(ok for name, ok in by_name.items() if name != "total Nash count")


def test_expect_unknown_field(capsys):
    assert run(capsys, "chsh", "--expect", "nope=1")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qcorr", "chsh", "--expect", "classical_max=2"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "abs_S" in r.stdout
