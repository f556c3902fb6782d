import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qcorr.games import (
    EXAMPLE_PURE_PROFILES, BayesianGame, GameError, MixedProfile, StrategicGame, agent_form,
)
from qcorr.nash import enumerate_nash, enumerate_pure_nash, is_nash


def bimatrix(A, B, labels=("r", "c")):
    rows, cols = len(A), len(A[0])
    return StrategicGame(labels, (tuple(f"x{i}" for i in range(rows)), tuple(f"y{j}" for j in range(cols))),
                         {(i, j): (F(A[i][j]), F(B[i][j])) for i in range(rows) for j in range(cols)})


MATCHING_PENNIES = bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])


def test_matching_pennies():
    assert enumerate_pure_nash(MATCHING_PENNIES) == []
    eq = enumerate_nash(MATCHING_PENNIES)
    assert len(eq.isolated) == 1 and not eq.components
    assert eq.isolated[0].strategies == ((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)))


def test_dominant_strategy_game():
    pd = bimatrix([[3, 0], [5, 1]], [[3, 5], [0, 1]])
    assert enumerate_pure_nash(pd) == [(1, 1)]
    eq = enumerate_nash(pd)
    assert [p.as_pure() for p in eq.isolated] == [(1, 1)]


def test_is_nash_witness():
    prof = MixedProfile.pure(MATCHING_PENNIES, (0, 0))
    chk = is_nash(MATCHING_PENNIES, prof)
    assert not chk and chk.witness.player == 1 and chk.witness.action == 1 and chk.witness.gain == 2


def test_example_pure_equilibria(example_af):
    pure = enumerate_pure_nash(example_af.game)
    want = sorted(example_af.behavioral(b) for b in EXAMPLE_PURE_PROFILES.values())
    assert pure == want


def test_example_full_enumeration(example_af):
    eq = enumerate_nash(example_af)
    t = eq.tallies()
    assert t["regimes"] == 729
    assert t["pure"] == 8
    assert t["components"] == 0
    # Observed exact count; see the project notes on the published figure.
    assert t["isolated"] == 27
    for p in eq.isolated:
        assert is_nash(example_af.game, p)
    pure = {p.as_pure() for p in eq.pure}
    assert pure == set(enumerate_pure_nash(example_af.game))


def test_example_equilibria_pair_agents_by_type(example_af):
    # every equilibrium pairs agent (1,t) with agent (2,t): complementary pure or both mixed
    eq = enumerate_nash(example_af)
    for p in eq.isolated:
        for t in range(3):
            s1, s2 = p.strategies[t], p.strategies[3 + t]
            if s1 in ((1, 0), (0, 1)):
                assert s2 == (s1[1], s1[0])
            else:
                assert s2 not in ((1, 0), (0, 1))


def test_parallel_enumeration_is_deterministic(example_af):
    a = enumerate_nash(example_af, workers=1)
    b = enumerate_nash(example_af, workers=4)
    assert [p.key() for p in a.isolated] == [p.key() for p in b.isolated]


def test_three_player_game_rejected():
    g = StrategicGame(("a", "b", "c"), (("x",), ("x",), ("x",)), {(0, 0, 0): (0, 0, 0)})
    with pytest.raises(GameError):
        enumerate_nash(g)


def test_degenerate_game_reports_component():
    # column player indifferent everywhere: a continuum of equilibria
    g = bimatrix([[1, 0], [0, 1]], [[0, 0], [0, 0]])
    eq = enumerate_nash(g)
    assert eq.components
    assert all(c.dimension >= 1 for c in eq.components)


def best_response_oracle(A, B):
    """Equilibrium count of a generic 2x2 game by direct case analysis."""
    count = 0
    for i, j in itertools.product(range(2), repeat=2):
        if A[i][j] >= A[1 - i][j] and B[i][j] >= B[i][1 - j]:
            count += 1
    # interior: column mix q makes row indifferent, row mix p makes column indifferent
    dq = A[0][0] - A[0][1] - A[1][0] + A[1][1]
    dp = B[0][0] - B[0][1] - B[1][0] + B[1][1]
    if dq != 0 and dp != 0:
        q = F(A[1][1] - A[0][1], dq)
        p = F(B[1][1] - B[1][0], dp)
        if 0 < q < 1 and 0 < p < 1:
            count += 1
    return count


@st.composite
def generic_2x2(draw):
    vals = draw(st.lists(st.integers(-20, 20), min_size=8, max_size=8, unique=True))
    return [vals[0:2], vals[2:4]], [vals[4:6], vals[6:8]]


@given(generic_2x2())
def test_random_2x2_against_oracle(AB):
    A, B = AB
    eq = enumerate_nash(bimatrix(A, B))
    assert not eq.components
    assert len(eq.isolated) == best_response_oracle(A, B)
    assert len(eq.isolated) % 2 == 1


@given(st.lists(st.integers(-5, 5), min_size=12, max_size=12))
def test_pure_subset_of_full(vals):
    A = [vals[0:3], vals[3:6]]
    B = [vals[6:9], vals[9:12]]
    g = bimatrix(A, B)
    eq = enumerate_nash(g)
    found = {p.as_pure() for p in eq.pure}
    pure = set(enumerate_pure_nash(g))
    # a pure equilibrium may sit inside a component instead of being isolated
    assert found <= pure
    if not eq.components:
        assert found == pure
    for p in eq.isolated:
        assert is_nash(g, p)


def test_small_bayesian_game():
    # one informed player with two types against an uninformed player
    pays = {}
    for w in range(2):
        for a in itertools.product(range(2), repeat=2):
            match = a[0] == a[1]
            pays[(w, a)] = (F(int(match == (w == 0))), F(int(match)))
    bg = BayesianGame(("I", "U"), ("w0", "w1"), (("x", "y"), ("x", "y")), (("s0", "s1"), ("*",)),
                      ((0, 1), (0, 0)), ((F(1, 2), F(1, 2)),) * 2, pays)
    eq = enumerate_nash(bg)
    af = agent_form(bg)
    assert eq.isolated
    for p in eq.isolated:
        assert is_nash(af.game, p)
