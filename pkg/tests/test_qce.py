import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qcorr.correlated import RecommendationDistribution, is_correlated_equilibrium, optimal_ce
from qcorr.games import EXAMPLE_PURE_PROFILES, NO, YES, GameError, MixedProfile, StrategicGame, agent_form
from qcorr.nash import enumerate_pure_nash, is_nash
from qcorr.qce import (
    AgentStrategy, ExperimentSpace, NotAnEquilibrium, QCEProfile, QCESetup, Verdict, action_marginals,
    agent_payoff, agreement_table, classical_fallback_profile, constant_profile, embed_correlated_equilibrium,
    expected_payoff_qce, verify_qce,
)
from qcorr.quantum import MeasurementDirection, QuantumError, orthogonal_menu, singlet, trine_menu


def test_example_payoff(example_qce):
    setup, prof = example_qce
    assert all(abs(p - 4.5) <= 1e-9 for p in expected_payoff_qce(setup, prof))


def test_exact_example_payoff(example_qce):
    setup, prof = example_qce
    assert expected_payoff_qce(setup.rationalized(), prof) == (F(9, 2), F(9, 2))


def test_agreement_table(example_qce):
    setup, prof = example_qce
    t = agreement_table(setup, prof)
    for i, j in itertools.product(range(3), repeat=2):
        assert abs(t[i][j] - (0 if i == j else 0.75)) <= 1e-9


def test_announcement_marginals(example_qce):
    setup, prof = example_qce
    for row in action_marginals(setup, prof, YES):
        assert all(abs(x - 0.5) <= 1e-9 for x in row)


def test_outcome_ignoring_profile_b(example_qce):
    setup, _ = example_qce
    prof = constant_profile(setup, EXAMPLE_PURE_PROFILES["b"])
    assert all(abs(p - 4) <= 1e-9 for p in expected_payoff_qce(setup, prof))


def test_all_yes_profile(example_qce):
    setup, _ = example_qce
    prof = constant_profile(setup, ((YES,) * 3, (YES,) * 3))
    assert expected_payoff_qce(setup.rationalized(), prof) == (-294, -294)
    assert F(1, 3) * -900 + F(2, 3) * 9 == -294


def test_strict_equilibrium(example_qce):
    setup, prof = example_qce
    rep = verify_qce(setup, prof)
    assert rep.verdict is Verdict.STRICT
    assert rep.margin > 0
    assert rep.deviations_evaluated == 66
    assert rep.witness is None


def test_exact_verification(example_qce):
    setup, prof = example_qce
    rep = verify_qce(setup.rationalized(), prof, tolerance=0)
    assert rep.verdict is Verdict.STRICT and rep.margin == F(303, 4)


def test_deviation_to_y_exact(example_qce):
    setup, prof = example_qce
    dev = prof.replace(0, 0, AgentStrategy(1, (YES, NO)))
    got = agent_payoff(setup.rationalized(), dev, 0, 0)
    # oracle: type A meets A, B, C with 1/3 each; agreement 3/4, 0, 3/4
    want = F(1, 3) * (F(-900) * F(3, 4) + 9 * 0 + 9 * F(3, 4))
    assert got == want == F(-891, 4)
    assert abs(agent_payoff(setup, dev, 0, 0) + 222.75) <= 1e-6


def test_all_yes_not_equilibrium(example_qce):
    setup, _ = example_qce
    rep = verify_qce(setup, constant_profile(setup, ((YES,) * 3, (YES,) * 3)))
    assert rep.verdict is Verdict.NOT
    assert rep.witness is not None and rep.witness.gap < 0


def test_orthogonal_axes_are_worse(example_qce):
    setup, prof = example_qce
    orth = QCESetup(setup.game, (orthogonal_menu(0), orthogonal_menu(1)), state=singlet())
    pay = expected_payoff_qce(orth, prof)
    # agreement 1/2 instead of 3/4: 6/9 * 1/2 * 9 = 3, below the classical 4
    assert all(abs(p - 3) <= 1e-9 for p in pay)


def test_quantum_beats_classical(example_qce, example_af):
    setup, prof = example_qce
    ce = optimal_ce(example_af)
    assert all(q > c for q, c in zip(expected_payoff_qce(setup, prof), ce.payoffs))


@pytest.mark.parametrize("name", sorted(EXAMPLE_PURE_PROFILES))
def test_fallback_profiles(example_qce, example_af, name):
    setup, _ = example_qce
    prof = classical_fallback_profile(setup, example_af.behavioral(EXAMPLE_PURE_PROFILES[name]), example_af)
    assert verify_qce(setup, prof).verdict is not Verdict.NOT
    assert verify_qce(setup.rationalized(), prof, 0).verdict is not Verdict.NOT


def test_fallback_rejects_non_equilibrium(example_qce, example_af):
    setup, _ = example_qce
    with pytest.raises(NotAnEquilibrium) as info:
        classical_fallback_profile(setup, example_af.behavioral(((YES,) * 3, (YES,) * 3)), example_af)
    assert info.value.witness.gain == 294


def test_experiment_space(example_qce):
    setup, prof = example_qce
    space = ExperimentSpace.build(setup, prof)
    assert abs(space.total_probability() - 1) <= 1e-9
    assert space.is_measurable()
    for w, p in space.state_marginal().items():
        assert abs(p - setup.game.priors[0][w]) <= 1e-9
    assert all(abs(a - b) <= 1e-9 for a, b in zip(space.expected_payoffs(), expected_payoff_qce(setup, prof)))
    exact = ExperimentSpace.build(setup.rationalized(), prof)
    assert exact.total_probability() == 1
    assert exact.expected_payoffs() == (F(9, 2), F(9, 2))


def test_profile_validation(example_qce):
    setup, prof = example_qce
    with pytest.raises(GameError):
        expected_payoff_qce(setup, prof.replace(0, 0, AgentStrategy(5, (0, 1))))
    with pytest.raises(GameError):
        expected_payoff_qce(setup, prof.replace(0, 0, AgentStrategy(0, (0, 2))))
    with pytest.raises(GameError):
        expected_payoff_qce(setup, QCEProfile(prof.strategies[:1]))
    with pytest.raises(ValueError):
        verify_qce(setup, prof, tolerance=-1)


def test_setup_validation(example_qce):
    setup, _ = example_qce
    with pytest.raises(GameError):
        QCESetup(setup.game, (trine_menu(0), ()), state=singlet())
    with pytest.raises(QuantumError):
        QCESetup(setup.game, (trine_menu(0), trine_menu(0)), state=singlet())
    with pytest.raises(GameError):
        QCESetup(setup.game, (trine_menu(0), trine_menu(1)))


def two_action_game(vals):
    return StrategicGame(("r", "c"), (("a", "b"), ("a", "b")),
                         {(i, j): (F(vals[2 * i + j]), F(vals[4 + 2 * i + j])) for i in range(2) for j in range(2)})


@given(st.lists(st.integers(-6, 6), min_size=8, max_size=8))
def test_embedded_ce_verifies(vals):
    g = two_action_game(vals)
    ce = optimal_ce(g)
    setup, prof = embed_correlated_equilibrium(g, ce.distribution)
    rep = verify_qce(setup, prof, tolerance=0)
    assert rep.verdict is not Verdict.NOT
    assert rep.payoffs == tuple(sum(p * g.payoffs[a][i] for a, p in ce.distribution.probs.items())
                                for i in range(2))


@given(st.lists(st.integers(-6, 6), min_size=8, max_size=8), st.data())
def test_singleton_menus_agree_with_is_nash(vals, data):
    g = two_action_game(vals)
    joint = data.draw(st.tuples(st.integers(0, 1), st.integers(0, 1)))
    d = RecommendationDistribution.point(joint)
    setup, _ = embed_correlated_equilibrium(g, d)
    prof = QCEProfile(tuple((AgentStrategy(0, (a, a)),) for a in joint))
    rep = verify_qce(setup, prof, tolerance=0)
    assert (rep.verdict is not Verdict.NOT) == bool(is_nash(g, MixedProfile.pure(g, joint)))


@given(st.lists(st.integers(-9, 9), min_size=36, max_size=36))
def test_fallback_never_fails_on_random_bayesian_games(vals):
    from qcorr.games import BayesianGame
    import itertools as it
    pays = {}
    k = 0
    for w in range(4):
        for a in it.product(range(2), repeat=2):
            pays[(w, a)] = (F(vals[k % 36]), F(vals[(k + 7) % 36]))
            k += 1
    bg = BayesianGame(("P1", "P2"), ("00", "01", "10", "11"), (("n", "y"), ("n", "y")),
                      (("s", "t"), ("s", "t")), ((0, 0, 1, 1), (0, 1, 0, 1)), ((F(1, 4),) * 4,) * 2, pays)
    af = agent_form(bg)
    setup = QCESetup(bg, (trine_menu(0), trine_menu(1)), state=singlet())
    for joint in enumerate_pure_nash(af.game):
        prof = classical_fallback_profile(setup, joint, af)
        assert verify_qce(setup, prof).verdict is not Verdict.NOT


def test_parallel_verification_matches(example_qce):
    setup, prof = example_qce
    a = verify_qce(setup.rationalized(), prof, 0, workers=1)
    b = verify_qce(setup.rationalized(), prof, 0, workers=4)
    assert a == b
