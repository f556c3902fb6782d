"""Correlated equilibria in revelation form, welfare-optimal CE by exact LP,
and exact convex hulls of equilibrium payoffs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Optional, Sequence, Union

from .exact import EQ, LE, Constraint, LPOutcome, LPProblem, as_rational, lp_solve, rref
from .games import AgentFormGame, GameError, JointAction, MixedProfile, StrategicGame, expected_payoff
from .nash import EquilibriumSet


@dataclass(frozen=True)
class RecommendationDistribution:
    """Exact distribution over joint actions; player ``i`` is told only ``a_i``."""

    probs: Mapping[JointAction, Fraction]

    def __post_init__(self):
        probs = {tuple(a): as_rational(p) for a, p in self.probs.items()}
        if any(p < 0 for p in probs.values()):
            raise GameError("recommendation probabilities must be nonnegative")
        if sum(probs.values()) != 1:
            raise GameError("recommendation probabilities must sum to 1")
        object.__setattr__(self, "probs", {a: p for a, p in sorted(probs.items()) if p})

    @classmethod
    def point(cls, joint: JointAction) -> "RecommendationDistribution":
        return cls({tuple(joint): Fraction(1)})

    @classmethod
    def from_profile(cls, game: StrategicGame, profile: MixedProfile) -> "RecommendationDistribution":
        """Product distribution of a mixed profile."""
        out = {}
        supports = [profile.support(i) for i in range(game.num_players)]
        for a in itertools.product(*supports):
            w = Fraction(1)
            for i, ai in enumerate(a):
                w *= profile.strategies[i][ai]
            out[a] = w
        return cls(out)

    @classmethod
    def mixture(cls, parts: Sequence[tuple[Fraction, "RecommendationDistribution"]]):
        out: dict = {}
        for w, d in parts:
            for a, p in d.probs.items():
                out[a] = out.get(a, Fraction(0)) + as_rational(w) * p
        return cls(out)


def canonicalize(
    game: StrategicGame,
    states: Sequence[Hashable],
    probabilities: Sequence,
    partitions: Sequence[Sequence[Sequence[Hashable]]],
    strategies: Sequence[Mapping[Hashable, int]],
) -> RecommendationDistribution:
    """Push an abstract correlated strategy ``(Omega, pi, P_i, sigma_i)`` to revelation form.

    ``strategies[i]`` must be constant on every cell of ``partitions[i]``.
    """
    probs = [as_rational(p) for p in probabilities]
    if len(probs) != len(states):
        raise GameError("one probability per state required")
    for i, (cells, sigma) in enumerate(zip(partitions, strategies)):
        covered = [w for cell in cells for w in cell]
        if sorted(map(repr, covered)) != sorted(map(repr, states)):
            raise GameError(f"information partition of player {i} does not partition the states")
        for cell in cells:
            if len({sigma[w] for w in cell}) > 1:
                raise GameError(f"strategy of player {i} is not measurable w.r.t. its partition")
    out: dict = {}
    for w, p in zip(states, probs):
        a = tuple(strategies[i][w] for i in range(game.num_players))
        out[a] = out.get(a, Fraction(0)) + p
    return RecommendationDistribution(out)


@dataclass(frozen=True)
class ObedienceViolation:
    player: int
    recommended: int
    deviation: int
    gain: Fraction


@dataclass(frozen=True)
class CECheck:
    ok: bool
    witness: Optional[ObedienceViolation] = None

    def __bool__(self) -> bool:
        return self.ok


def _obedience_gain(game: StrategicGame, weights: Mapping[JointAction, Fraction], i: int, r: int, d: int):
    gain = Fraction(0)
    for a, p in weights.items():
        if a[i] != r or not p:
            continue
        b = list(a)
        b[i] = d
        gain += p * (game.payoffs[tuple(b)][i] - game.payoffs[a][i])
    return gain


def is_correlated_equilibrium(game: StrategicGame, dist: RecommendationDistribution) -> CECheck:
    """Exact check of every obedience constraint (unconditional form)."""
    for a in dist.probs:
        if len(a) != game.num_players or any(not 0 <= x < n for x, n in zip(a, game.shape)):
            raise GameError(f"joint action {a} is not in the game")
    for i in range(game.num_players):
        for r in range(game.shape[i]):
            if not any(a[i] == r for a in dist.probs):
                continue
            for d in range(game.shape[i]):
                if d == r:
                    continue
                gain = _obedience_gain(game, dist.probs, i, r, d)
                if gain > 0:
                    return CECheck(False, ObedienceViolation(i, r, d, gain))
    return CECheck(True)


def ce_payoffs(game: StrategicGame, dist: RecommendationDistribution) -> tuple[Fraction, ...]:
    total = [Fraction(0)] * game.num_players
    for a, p in dist.probs.items():
        for i, u in enumerate(game.payoffs[a]):
            total[i] += p * u
    return tuple(total)


@dataclass(frozen=True)
class CEResult:
    outcome: LPOutcome
    distribution: RecommendationDistribution
    value: Fraction
    payoffs: tuple[Fraction, ...]
    agent_weights: tuple[Fraction, ...]


def _agent_weights(game, weights) -> tuple[StrategicGame, tuple[Fraction, ...], Optional[AgentFormGame]]:
    if isinstance(game, AgentFormGame):
        sg = game.game
        w = [as_rational(x) for x in weights] if weights is not None else None
        bg = game.bayesian
        if w is None:
            w = [Fraction(1)] * bg.num_players
        if len(w) == bg.num_players:
            w = [w[ag.player] * bg.type_probability(ag.player, ag.type) for ag in game.agents]
        elif len(w) != sg.num_players:
            raise GameError("weights must be given per original player or per agent")
        return sg, tuple(w), game
    w = tuple(as_rational(x) for x in weights) if weights is not None else (Fraction(1),) * game.num_players
    if len(w) != game.num_players:
        raise GameError("one weight per player required")
    return game, w, None


def optimal_ce(game: Union[StrategicGame, AgentFormGame], weights: Optional[Sequence] = None) -> CEResult:
    """Correlated equilibrium maximizing a weighted payoff sum.

    For an :class:`AgentFormGame`, weights may be given per original player;
    each agent then carries its player's weight times its type probability,
    so the objective is the weighted sum of prior-expected player payoffs.
    Reported ``payoffs`` follow the same (player-level) view.
    """
    sg, w, af = _agent_weights(game, weights)
    joints = list(sg.joint_actions())
    index = {a: k for k, a in enumerate(joints)}
    n = len(joints)
    objective = [sum((wi * u for wi, u in zip(w, sg.payoffs[a])), Fraction(0)) for a in joints]
    cons = [Constraint((Fraction(1),) * n, EQ, Fraction(1))]
    for i in range(sg.num_players):
        for r in range(sg.shape[i]):
            for d in range(sg.shape[i]):
                if d == r:
                    continue
                row = [Fraction(0)] * n
                for a in joints:
                    if a[i] != r:
                        continue
                    b = list(a)
                    b[i] = d
                    row[index[a]] = sg.payoffs[tuple(b)][i] - sg.payoffs[a][i]
                cons.append(Constraint(tuple(row), LE, Fraction(0)))
    out = lp_solve(LPProblem.nonnegative(objective, cons), "max")
    if not out.optimal:
        raise ArithmeticError(f"correlated-equilibrium LP returned {out.status.value}")
    dist = RecommendationDistribution({a: out.x[k] for k, a in enumerate(joints)})
    if af is not None:
        agent_u = ce_payoffs(sg, dist)
        bg = af.bayesian
        pay = [Fraction(0)] * bg.num_players
        for k, ag in enumerate(af.agents):
            pay[ag.player] += bg.type_probability(ag.player, ag.type) * agent_u[k]
        payoffs = tuple(pay)
    else:
        payoffs = ce_payoffs(sg, dist)
    return CEResult(out, dist, out.value, payoffs, w)


# ------------------------------------------------------------------ hulls


def in_convex_hull(point: Sequence[Fraction], points: Sequence[Sequence[Fraction]]) -> bool:
    """Exact membership via LP feasibility of a convex combination."""
    if not points:
        return False
    m = len(points)
    cons = [Constraint((Fraction(1),) * m, EQ, Fraction(1))]
    for d in range(len(point)):
        cons.append(Constraint(tuple(p[d] for p in points), EQ, as_rational(point[d])))
    return lp_solve(LPProblem.nonnegative((Fraction(0),) * m, cons), "max").optimal


@dataclass(frozen=True)
class PayoffHull:
    """Convex hull of finitely many exact payoff vectors."""

    extreme_points: tuple[tuple[Fraction, ...], ...]
    points: tuple[tuple[Fraction, ...], ...]
    components_omitted: int = 0

    def contains(self, point: Sequence) -> bool:
        return in_convex_hull(tuple(as_rational(x) for x in point), self.extreme_points)

    @property
    def dimension(self) -> int:
        """Affine dimension of the hull."""
        if len(self.extreme_points) <= 1:
            return 0
        base = self.extreme_points[0]
        diffs = [[x - y for x, y in zip(p, base)] for p in self.extreme_points[1:]]
        return len(rref(diffs)[1])


def payoff_hull(points: Sequence[Sequence[Fraction]], components_omitted: int = 0) -> PayoffHull:
    pts = sorted({tuple(as_rational(x) for x in p) for p in points})
    if not pts:
        raise GameError("cannot take the hull of an empty set of payoffs")
    extreme = tuple(p for p in pts if not in_convex_hull(p, [q for q in pts if q != p]))
    return PayoffHull(extreme, tuple(pts), components_omitted)


def nash_payoff_hull(equilibria: EquilibriumSet, game: Union[StrategicGame, AgentFormGame],
                     pure_only: bool = False) -> PayoffHull:
    """Hull of the payoff vectors of the isolated equilibria.

    Payoffs are player-level for agent-form games.  Components are not
    sampled; their number is recorded in ``components_omitted``.
    """
    profiles = equilibria.pure if pure_only else list(equilibria.isolated)
    if not profiles:
        raise GameError("empty equilibrium set")
    if isinstance(game, AgentFormGame):
        pts = [game.player_payoffs(p) for p in profiles]
    else:
        pts = [expected_payoff(game, p) for p in profiles]
    return payoff_hull(pts, len(equilibria.components))
