"""Exact Nash, correlated and quantum correlated equilibria of finite games."""
__version__ = "0.1.0"

from .exact import LPProblem, LPOutcome, LPStatus, Rational, linear_solve, lp_solve  # noqa: E402
from .games import (  # noqa: E402
    AgentFormGame, BayesianGame, MixedProfile, StrategicGame, agent_form, build_example_game, expected_payoff,
)
from .nash import enumerate_nash, enumerate_pure_nash, is_nash  # noqa: E402
from .correlated import RecommendationDistribution, is_correlated_equilibrium, optimal_ce  # noqa: E402
from .quantum import MeasurementDirection, PureState, born_joint_distribution, singlet, trine_menu  # noqa: E402
from .qce import QCEProfile, QCESetup, build_example_qce, expected_payoff_qce, verify_qce  # noqa: E402
from .bell import AgreementTable, chsh_value, lhv_feasible, max_classical_agreement  # noqa: E402
from .kernels import DEFAULT_BACKEND, available_backends  # noqa: E402
