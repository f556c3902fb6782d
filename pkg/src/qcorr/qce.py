"""Quantum correlated equilibria: type-contingent measurement choices followed
by outcome-contingent actions, with exhaustive single-agent deviation checks."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from ._parallel import pmap
from .correlated import RecommendationDistribution
from .games import (
    NO, YES, AgentFormGame, BayesianGame, GameError, JointAction, MixedProfile, StrategicGame,
    agent_form, build_example_game,
)
from .nash import Deviation, is_nash
from .quantum import (
    DOWN, UP, MeasurementDirection, PureState, QuantumError, born_joint_distribution, singlet, trine_menu,
)

DEFAULT_TOLERANCE = 1e-6
Number = Union[float, Fraction]
OutcomeTable = Mapping[tuple[int, ...], Mapping[tuple[int, ...], Fraction]]


@dataclass(frozen=True, eq=False)
class QCESetup:
    """Bayesian game + signalling device + one measurement menu per player.

    The device is either a quantum ``state`` (Born rule, floating point) or an
    exact ``table`` mapping each joint measurement choice (one menu index per
    player) to a distribution over joint outcomes.  With a table every payoff
    and verdict is exact.
    """

    game: BayesianGame
    menus: tuple[tuple[MeasurementDirection, ...], ...]
    state: Optional[PureState] = None
    table: Optional[OutcomeTable] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = self.game.num_players
        menus = tuple(tuple(m) for m in self.menus)
        object.__setattr__(self, "menus", menus)
        if len(menus) != n:
            raise GameError("one measurement menu per player required")
        if any(len(m) == 0 for m in menus):
            raise GameError("every measurement menu must be nonempty")
        if (self.state is None) == (self.table is None):
            raise GameError("give exactly one of a quantum state or an exact outcome table")
        if self.state is not None:
            owned = set(self.state.owners)
            for i in range(n):
                if i not in owned:
                    raise QuantumError(f"player {self.game.players[i]} holds no qubit")
                for d in menus[i]:
                    if not 0 <= d.qubit < self.state.num_qubits or self.state.owners[d.qubit] != i:
                        raise QuantumError(
                            f"measurement {d.label or d.direction} of {self.game.players[i]} "
                            f"targets qubit {d.qubit}, which that player does not hold"
                        )
        else:
            table = {}
            for key in itertools.product(*(range(len(m)) for m in menus)):
                if key not in self.table:
                    raise GameError(f"outcome table has no entry for measurements {key}")
                dist = {tuple(o): Fraction(p) for o, p in self.table[key].items()}
                if any(p < 0 for p in dist.values()) or sum(dist.values()) != 1:
                    raise GameError(f"outcome table entry {key} is not a distribution")
                if any(len(o) != n or any(x not in (UP, DOWN) for x in o) for o in dist):
                    raise GameError(f"outcome table entry {key} has malformed outcomes")
                table[key] = dist
            object.__setattr__(self, "table", table)

    @property
    def exact(self) -> bool:
        return self.table is not None

    def joint_distribution(self, measurements: tuple[int, ...]) -> dict[tuple[int, ...], Number]:
        """Outcome distribution (one outcome per player) given each player's menu index."""
        key = tuple(measurements)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.table is not None:
            dist = dict(self.table[key])
        else:
            dirs = [self.menus[i][m] for i, m in enumerate(key)]
            dist = dict(born_joint_distribution(self.state, dirs).probs)
        self._cache[key] = dist
        return dist

    def rationalized(self, max_denominator: int = 10 ** 6, tol: float = 1e-9) -> "QCESetup":
        """Exact-table copy of a quantum setup, snapping each Born probability to
        the nearest fraction with bounded denominator (must lie within ``tol``)."""
        if self.state is None:
            return self
        table = {}
        for key in itertools.product(*(range(len(m)) for m in self.menus)):
            dist = {}
            for o, p in self.joint_distribution(key).items():
                q = Fraction(p).limit_denominator(max_denominator)
                if abs(float(q) - p) > tol:
                    raise QuantumError(f"probability {p!r} has no rational within {tol}")
                dist[o] = q
            if sum(dist.values()) != 1:
                raise QuantumError(f"rationalized distribution for {key} does not sum to 1")
            table[key] = dist
        return QCESetup(self.game, self.menus, table=table)


@dataclass(frozen=True)
class AgentStrategy:
    """Measurement (menu index) and policy ``(action if up, action if down)``."""

    measurement: int
    policy: tuple[int, int]

    def action(self, outcome: int) -> int:
        return self.policy[outcome]

    @property
    def ignores_outcome(self) -> bool:
        return self.policy[0] == self.policy[1]


@dataclass(frozen=True)
class QCEProfile:
    strategies: tuple[tuple[AgentStrategy, ...], ...]  # [player][type]

    def of(self, player: int, t: int) -> AgentStrategy:
        return self.strategies[player][t]

    def replace(self, player: int, t: int, strat: AgentStrategy) -> "QCEProfile":
        rows = [list(r) for r in self.strategies]
        rows[player][t] = strat
        return QCEProfile(tuple(tuple(r) for r in rows))


def _check_profile(setup: QCESetup, profile: QCEProfile) -> None:
    g = setup.game
    if len(profile.strategies) != g.num_players:
        raise GameError("profile has the wrong number of players")
    for i, row in enumerate(profile.strategies):
        if len(row) != len(g.type_labels[i]):
            raise GameError(f"profile for {g.players[i]} must give one strategy per type")
        for s in row:
            if not 0 <= s.measurement < len(setup.menus[i]):
                raise GameError(f"measurement index {s.measurement} outside {g.players[i]}'s menu")
            if len(s.policy) != 2 or any(not 0 <= a < g.shape[i] for a in s.policy):
                raise GameError(f"policy {s.policy} is not a map from outcomes to {g.players[i]}'s actions")


def _state_value(setup: QCESetup, profile: QCEProfile, w: int, player: int) -> Number:
    """Expected payoff of ``player`` in state ``w`` over the device outcomes."""
    g = setup.game
    strat = [profile.of(j, g.signals[j][w]) for j in range(g.num_players)]
    dist = setup.joint_distribution(tuple(s.measurement for s in strat))
    total: Number = Fraction(0) if setup.exact else 0.0
    for o, p in dist.items():
        if not p:
            continue
        a = tuple(s.action(x) for s, x in zip(strat, o))
        u = g.payoffs[(w, a)][player]
        if u:
            total += p * u
    return total


def agent_payoff(setup: QCESetup, profile: QCEProfile, player: int, t: int) -> Number:
    """Conditional expected payoff of ``player`` given its type ``t``."""
    total: Number = Fraction(0) if setup.exact else 0.0
    for w, p in setup.game.conditional(player, t):
        total += p * _state_value(setup, profile, w, player)
    return total


def expected_payoff_qce(setup: QCESetup, profile: QCEProfile) -> tuple[Number, ...]:
    """Prior-expected payoff of each player under the profile."""
    _check_profile(setup, profile)
    g = setup.game
    out = []
    for i in range(g.num_players):
        total: Number = Fraction(0) if setup.exact else 0.0
        for w, p in enumerate(g.priors[i]):
            if p:
                total += p * _state_value(setup, profile, w, i)
        out.append(total)
    return tuple(out)


# ------------------------------------------------------------ experiment space


@dataclass(frozen=True)
class ExperimentState:
    state: int
    measurements: tuple[int, ...]
    outcomes: tuple[int, ...]
    probability: Number


@dataclass(frozen=True)
class ExperimentSpace:
    """Finite probability space of (state, measurements, outcomes) induced by a profile.

    A player's information cell at a point is its own (type, measurement,
    outcome); actions are functions of that cell by construction.
    """

    setup: QCESetup
    profile: QCEProfile
    points: tuple[ExperimentState, ...]
    prior_player: int

    @classmethod
    def build(cls, setup: QCESetup, profile: QCEProfile, prior_player: int = 0) -> "ExperimentSpace":
        _check_profile(setup, profile)
        g = setup.game
        pts = []
        for w, pw in enumerate(g.priors[prior_player]):
            if not pw:
                continue
            ms = tuple(profile.of(j, g.signals[j][w]).measurement for j in range(g.num_players))
            for o, p in setup.joint_distribution(ms).items():
                pts.append(ExperimentState(w, ms, o, pw * p))
        return cls(setup, profile, tuple(pts), prior_player)

    def total_probability(self) -> Number:
        return sum(p.probability for p in self.points)

    def cell(self, player: int, point: ExperimentState) -> tuple[int, int, int]:
        return (self.setup.game.signals[player][point.state], point.measurements[player], point.outcomes[player])

    def action(self, player: int, point: ExperimentState) -> int:
        t = self.setup.game.signals[player][point.state]
        return self.profile.of(player, t).action(point.outcomes[player])

    def state_marginal(self) -> dict[int, Number]:
        out: dict[int, Number] = {}
        for p in self.points:
            out[p.state] = out.get(p.state, 0) + p.probability
        return out

    def is_measurable(self) -> bool:
        """Each player's action is constant on each of its information cells."""
        for i in range(self.setup.game.num_players):
            seen: dict = {}
            for p in self.points:
                c = self.cell(i, p)
                a = self.action(i, p)
                if seen.setdefault(c, a) != a:
                    return False
        return True

    def expected_payoffs(self) -> tuple[Number, ...]:
        g = self.setup.game
        out = []
        for i in range(g.num_players):
            total = 0
            for p in self.points:
                a = tuple(self.action(j, p) for j in range(g.num_players))
                total += p.probability * g.payoffs[(p.state, a)][i]
            out.append(total)
        return tuple(out)


# ----------------------------------------------------------------- verification


class Verdict(enum.Enum):
    STRICT = "StrictEquilibrium"
    WEAK = "WeakEquilibrium"
    NOT = "NotEquilibrium"


@dataclass(frozen=True)
class AgentCheck:
    player: int
    type: int
    payoff: Number
    best_deviation: AgentStrategy
    best_deviation_payoff: Number
    evaluated: int

    @property
    def gap(self) -> Number:
        """Incumbent payoff minus the best deviation payoff (positive = deviation loses)."""
        return self.payoff - self.best_deviation_payoff


@dataclass(frozen=True)
class VerificationReport:
    payoffs: tuple[Number, ...]
    verdict: Verdict
    agents: tuple[AgentCheck, ...]
    margin: Number
    deviations_evaluated: int
    tolerance: float
    witness: Optional[AgentCheck] = None

    @property
    def is_equilibrium(self) -> bool:
        return self.verdict is not Verdict.NOT


def agent_deviations(setup: QCESetup, player: int) -> list[AgentStrategy]:
    """Every (measurement, policy) pair available to one agent, in canonical order."""
    k = setup.game.shape[player]
    return [AgentStrategy(m, pol) for m in range(len(setup.menus[player]))
            for pol in itertools.product(range(k), repeat=2)]


def verify_qce(setup: QCESetup, profile: QCEProfile, tolerance: float = DEFAULT_TOLERANCE,
               workers: Optional[int] = None) -> VerificationReport:
    """Check every single-agent deviation (new measurement and/or new policy).

    Strict if every deviation loses by more than ``tolerance``; Weak if none
    gains more than ``tolerance`` but some come within it; otherwise
    NotEquilibrium, with the agent whose best deviation gains the most as
    the witness (first in agent order on ties).
    """
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    _check_profile(setup, profile)
    g = setup.game
    agents = [(i, t) for i in range(g.num_players) for t in range(len(g.type_labels[i]))]

    def check(agent):
        i, t = agent
        incumbent = profile.of(i, t)
        base = agent_payoff(setup, profile, i, t)
        best, best_u, count = None, None, 0
        for dev in agent_deviations(setup, i):
            if dev == incumbent:
                continue
            u = agent_payoff(setup, profile.replace(i, t, dev), i, t)
            count += 1
            if best_u is None or u > best_u:
                best, best_u = dev, u
        if best is None:
            best, best_u = incumbent, base
        return AgentCheck(i, t, base, best, best_u, count)

    checks = pmap(check, agents, workers)
    margin = min(c.gap for c in checks)
    if margin > tolerance:
        verdict = Verdict.STRICT
    elif margin >= -tolerance:
        verdict = Verdict.WEAK
    else:
        verdict = Verdict.NOT
    witness = None
    if verdict is Verdict.NOT:
        witness = next(c for c in checks if c.gap == margin)
    return VerificationReport(
        expected_payoff_qce(setup, profile), verdict, tuple(checks), margin,
        sum(c.evaluated for c in checks), tolerance, witness,
    )


# ------------------------------------------------------------------ builders


class NotAnEquilibrium(GameError):
    def __init__(self, message: str, witness: Optional[Deviation] = None):
        super().__init__(message)
        self.witness = witness


def classical_fallback_profile(setup: QCESetup, nash_profile: Union[JointAction, MixedProfile],
                               af: Optional[AgentFormGame] = None) -> QCEProfile:
    """Ignore the device and play a pure Nash equilibrium of the agent form.

    ``nash_profile`` is a joint action over agents (agent-form order).
    """
    af = af or agent_form(setup.game)
    if isinstance(nash_profile, MixedProfile):
        joint = nash_profile.as_pure()
        if joint is None:
            raise GameError("fallback profiles need a pure equilibrium")
        prof = nash_profile
    else:
        joint = tuple(nash_profile)
        prof = MixedProfile.pure(af.game, joint)
    verdict = is_nash(af.game, prof)
    if not verdict:
        w = verdict.witness
        ag = af.agents[w.player]
        raise NotAnEquilibrium(
            f"agent {af.game.players[w.player]} gains {w.gain} by switching to "
            f"{af.game.action_labels[w.player][w.action]!r}", w,
        )
    rows = [[None] * len(setup.game.type_labels[i]) for i in range(setup.game.num_players)]
    for k, ag in enumerate(af.agents):
        rows[ag.player][ag.type] = AgentStrategy(0, (joint[k], joint[k]))
    return QCEProfile(tuple(tuple(r) for r in rows))


def build_example_qce() -> tuple[QCESetup, QCEProfile]:
    """Example game, singlet device, trine menus; type A/B/C measures x/y/z and
    says yes iff the outcome is up."""
    game = build_example_game()
    setup = QCESetup(game, (trine_menu(0), trine_menu(1)), state=singlet())
    strat = tuple(AgentStrategy(t, (YES, NO)) for t in range(3))
    return setup, QCEProfile((strat, strat))


def constant_profile(setup: QCESetup, actions: Sequence[Sequence[int]], measurement: int = 0) -> QCEProfile:
    """Outcome-ignoring profile from per-player ``type -> action`` lists."""
    return QCEProfile(tuple(
        tuple(AgentStrategy(measurement, (a, a)) for a in row) for row in actions
    ))


def agreement_table(setup: QCESetup, profile: QCEProfile) -> list[list[Number]]:
    """P(the two players' actions coincide | type pair) for a two-player setup."""
    g = setup.game
    if g.num_players != 2:
        raise GameError("agreement tables are defined for two players")
    out = []
    for t1 in range(len(g.type_labels[0])):
        row = []
        for t2 in range(len(g.type_labels[1])):
            s1, s2 = profile.of(0, t1), profile.of(1, t2)
            dist = setup.joint_distribution((s1.measurement, s2.measurement))
            row.append(sum((p for o, p in dist.items() if s1.action(o[0]) == s2.action(o[1])),
                           Fraction(0) if setup.exact else 0.0))
        out.append(row)
    return out


def action_marginals(setup: QCESetup, profile: QCEProfile, action: int = YES) -> list[list[Number]]:
    """Per player and type: probability of playing ``action``, averaged over the
    opponents' types and the device outcomes."""
    g = setup.game
    out = []
    for i in range(g.num_players):
        row = []
        for t in range(len(g.type_labels[i])):
            total: Number = Fraction(0) if setup.exact else 0.0
            for w, p in g.conditional(i, t):
                ms = tuple(profile.of(j, g.signals[j][w]).measurement for j in range(g.num_players))
                for o, q in setup.joint_distribution(ms).items():
                    if profile.of(i, t).action(o[i]) == action:
                        total += p * q
            row.append(total)
        out.append(row)
    return out


def embed_correlated_equilibrium(game: StrategicGame, dist: RecommendationDistribution
                                 ) -> tuple[QCESetup, QCEProfile]:
    """Run a classical correlated equilibrium of a binary-action game through
    the device framework: one measurement per player whose outcome is its
    recommendation, and the policy "play what you are told"."""
    if any(k != 2 for k in game.shape):
        raise GameError("embedding needs two actions per player (two-outcome measurements)")
    bg = BayesianGame.from_strategic(game)
    menus = tuple((MeasurementDirection((0.0, 0.0, 1.0), i, "rec"),) for i in range(game.num_players))
    table = {(0,) * game.num_players: dict(dist.probs)}
    for a in itertools.product((0, 1), repeat=game.num_players):
        table[(0,) * game.num_players].setdefault(a, Fraction(0))
    setup = QCESetup(bg, menus, table=table)
    profile = QCEProfile(tuple((AgentStrategy(0, (0, 1)),) for _ in range(game.num_players)))
    return setup, profile
