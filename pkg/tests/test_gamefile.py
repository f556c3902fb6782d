import textwrap
from fractions import Fraction as F
from pathlib import Path

import pytest

from qcorr.bell import AgreementTable
from qcorr.gamefile import GameFile, GameFileError, dumps, load, loads
from qcorr.qce import Verdict, verify_qce

GAMES = Path(__file__).resolve().parent.parent / "games"

MINIMAL = textwrap.dedent("""\
    players: [P1, P2]
    actions: {P1: [no, yes], P2: [no, yes]}
    types: {P1: [A, B], P2: [A, B]}
    prior: uniform
    payoffs:
      default: [0, 0]
      entries:
        - {types: [A, A], actions: [yes, yes], payoff: [-900, -900]}
        - {types: [A, B], actions: [yes, yes], payoff: [9/2, "9"]}
    """)


def test_parse_minimal():
    gf = loads(MINIMAL)
    g = gf.game
    assert g.action_labels[0] == ("no", "yes")
    assert g.priors[0] == (F(1, 4),) * 4
    assert g.payoffs[(1, (1, 1))] == (F(9, 2), 9)
    assert g.payoffs[(3, (0, 0))] == (0, 0)


def test_example_file_round_trip(example_qce):
    setup, prof = example_qce
    gf = load(str(GAMES / "example.yaml"))
    assert gf.game == setup.game
    assert gf.profile == prof
    assert [[d.direction for d in m] for m in gf.setup.menus] == [[d.direction for d in m] for m in setup.menus]
    assert gf.table == AgreementTable.uniform(3, 0, F(3, 4))
    again = loads(dumps(gf))
    assert again.game == gf.game and again.profile == gf.profile and dumps(again) == dumps(gf)
    assert verify_qce(gf.setup, gf.profile).verdict is Verdict.STRICT


def test_round_trip_strategic():
    gf = load(str(GAMES / "matching_pennies.yaml"))
    assert not gf.has_types
    assert loads(dumps(gf)).game == gf.game
    assert gf.strategic().payoffs[(0, 0)] == (1, -1)


def test_round_trip_amplitude_state(example_qce):
    setup, prof = example_qce
    text = dumps(GameFile(setup.game, setup, prof))
    assert "amplitudes" in text
    gf = loads(text)
    assert (gf.setup.state.amplitudes == setup.state.amplitudes).all()


@pytest.mark.parametrize("text, where, msg", [
    ("players: [a\n", "2:1", "YAML syntax"),
    ("players: [P1]\nactions: {P1: [x]}\npayoffs: {entries: [{actions: [z], payoff: [1]}]}\n", "3:32", "unknown action"),
    ("players: [P1]\nactions: {P1: [x]}\npayoffs: {entries: [{actions: [x], payoff: [0.1.2]}]}\n", "3:45", "exact rational"),
    ("players: [P1]\nactions: {P1: [x, y]}\npayoffs: {entries: [{actions: [x], payoff: [1]}]}\n", "3:10", "no payoff"),
    ("players: [P1]\nactions: {P2: [x]}\npayoffs: {}\n", "2:11", "unknown player"),
    ("players: [P1]\nactions: {P1: [x]}\npayoffs: {}\nbogus: 1\n", "4:1", "unknown section"),
    ("players: [P1]\nactions: {P1: [x]}\ntypes: {P1: [s, t]}\nprior: [{types: [s], p: 1/2}]\n"
     "payoffs: {default: [0]}\n", "4:8", "sums to 1/2"),
])
def test_diagnostics(text, where, msg):
    with pytest.raises(GameFileError, match=msg) as info:
        loads(text, source="g.yaml")
    assert f"g.yaml:{where}" in str(info.value)


def test_yes_no_stay_strings():
    gf = loads("players: [P1]\nactions: {P1: [no, yes, on, off]}\npayoffs: {default: [1]}\n")
    assert gf.game.action_labels[0] == ("no", "yes", "on", "off")


def test_quantum_section_errors():
    base = MINIMAL + "quantum:\n  state: singlet\n  menus:\n"
    with pytest.raises(GameFileError, match="not a unit vector"):
        loads(base + "    P1: [{qubit: 0, direction: [1, 1, 0]}]\n    P2: [{qubit: 1, direction: [1, 0, 0]}]\n")
    with pytest.raises(GameFileError, match="does not hold"):
        loads(base + "    P1: [{qubit: 1, direction: [1, 0, 0]}]\n    P2: [{qubit: 1, direction: [1, 0, 0]}]\n")
    with pytest.raises(GameFileError, match="unknown state preset"):
        loads(MINIMAL + "quantum:\n  state: ghz\n  menus: {}\n")


def test_profile_needs_quantum():
    with pytest.raises(GameFileError, match="needs a quantum"):
        loads(MINIMAL + "profile: {}\n")


def test_missing_file():
    with pytest.raises(GameFileError, match="cannot read"):
        load("/nonexistent/game.yaml")
