"""Pure and mixed Nash equilibria by exact support enumeration.

Mixed enumeration works on the agent form of a two-player Bayesian game.
Each agent's payoff depends only on its own action and on the agents of
the *other* player, so the indifference conditions of one side are linear
in the other side's behavioural probabilities and every support regime
reduces to two independent exact linear solves.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from ._parallel import pmap
from .exact import EQ, GE, LE, Constraint, LPProblem, linear_solve, lp_solve
from .games import (
    AgentFormGame, BayesianGame, GameError, JointAction, MixedProfile, StrategicGame,
    action_values, agent_form,
)


@dataclass(frozen=True)
class Deviation:
    player: int
    action: int
    gain: Fraction


@dataclass(frozen=True)
class NashCheck:
    """Verdict of :func:`is_nash`; truthy iff the profile is an equilibrium."""

    ok: bool
    witness: Optional[Deviation] = None
    payoffs: tuple[Fraction, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def is_nash(game: StrategicGame, profile: MixedProfile) -> NashCheck:
    """Exact equilibrium test.

    Every support action must attain the player's best pure-action value.
    On failure the witness is the first player (in order) with a strictly
    improving pure deviation, using that player's best such action.
    """
    payoffs = []
    for i in range(game.num_players):
        values = action_values(game, profile, i)
        current = sum((p * v for p, v in zip(profile.strategies[i], values)), Fraction(0))
        payoffs.append(current)
        best = max(values)
        if best > current:
            k = values.index(best)
            return NashCheck(False, Deviation(i, k, best - current), ())
    return NashCheck(True, None, tuple(payoffs))


def enumerate_pure_nash(game: StrategicGame) -> list[JointAction]:
    """All pure equilibria, in lexicographic order of joint action."""
    out = []
    shape = game.shape
    for a in game.joint_actions():
        u = game.payoffs[a]
        stable = True
        for i in range(game.num_players):
            b = list(a)
            for k in range(shape[i]):
                if k == a[i]:
                    continue
                b[i] = k
                if game.payoffs[tuple(b)][i] > u[i]:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            out.append(a)
    return out


# -------------------------------------------------------------- enumeration


@dataclass(frozen=True)
class SupportProfile:
    supports: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if any(len(s) == 0 for s in self.supports):
            raise GameError("every support must be nonempty")


@dataclass(frozen=True)
class EquilibriumComponent:
    """A non-isolated family of equilibria sharing one support profile.

    Points are ``particular + sum(t_k * null_basis[k])`` over the flattened
    (agent, action) probability coordinates, restricted to the region where
    support probabilities stay positive and off-support actions are not
    better replies (``constraints``).
    """

    support: SupportProfile
    particular: tuple[Fraction, ...]
    null_basis: tuple[tuple[Fraction, ...], ...]
    constraints: str

    @property
    def dimension(self) -> int:
        return len(self.null_basis)


@dataclass(frozen=True)
class EquilibriumSet:
    isolated: tuple[MixedProfile, ...]
    components: tuple[EquilibriumComponent, ...]
    regimes: int

    @property
    def pure(self) -> list[MixedProfile]:
        return [p for p in self.isolated if p.is_pure()]

    def tallies(self) -> dict[str, int]:
        return {
            "pure": len(self.pure),
            "isolated": len(self.isolated),
            "components": len(self.components),
            "isolated_plus_components": len(self.isolated) + len(self.components),
            "regimes": self.regimes,
        }


class _Side:
    """Linear payoff data for one original player's agents.

    ``coef[k][a]`` maps an opponent coordinate ``(agent, action)`` to its
    coefficient in agent ``k``'s expected payoff from action ``a``.
    """

    def __init__(self, af: AgentFormGame, player: int):
        bg = af.bayesian
        other = 1 - player
        self.mine = af.agents_of(player)
        self.theirs = af.agents_of(other)
        self.n_actions = bg.shape[player]
        self.n_opp_actions = bg.shape[other]
        self.coef = {}
        for k in self.mine:
            ag = af.agents[k]
            rows = []
            for a in range(self.n_actions):
                row: dict[tuple[int, int], Fraction] = {}
                for w, p in bg.conditional(player, ag.type):
                    opp = af.agent_index(other, bg.signals[other][w])
                    for b in range(self.n_opp_actions):
                        joint = (a, b) if player == 0 else (b, a)
                        u = bg.payoffs[(w, joint)][player]
                        if u:
                            row[(opp, b)] = row.get((opp, b), Fraction(0)) + p * u
                rows.append(row)
            self.coef[k] = rows

    def solve(self, my_support: dict[int, tuple[int, ...]], their_support: dict[int, tuple[int, ...]]):
        """Opponent probabilities making every agent of mine obey its support.

        Returns ``None`` (no solution with exactly this support), a point
        ``{(agent, action): prob}``, or a parametric family.
        """
        coords = [(l, b) for l in self.theirs for b in their_support[l]]
        index = {c: j for j, c in enumerate(coords)}
        nvar = len(coords)

        def value_row(k, a):
            v = [Fraction(0)] * nvar
            for c, x in self.coef[k][a].items():
                j = index.get(c)
                if j is not None:
                    v[j] += x
            return v

        matrix, rhs = [], []
        for k in self.mine:
            sup = my_support[k]
            base = value_row(k, sup[0])
            for a in sup[1:]:
                matrix.append([x - y for x, y in zip(value_row(k, a), base)])
                rhs.append(Fraction(0))
        for l in self.theirs:
            matrix.append([Fraction(int(c[0] == l)) for c in coords])
            rhs.append(Fraction(1))
        sol = linear_solve(matrix, rhs)
        if not sol.consistent:
            return None

        # Off-support replies must not beat the support value: (row_a - base) . q <= 0
        br_rows = []
        for k in self.mine:
            sup = my_support[k]
            base = value_row(k, sup[0])
            for a in range(self.n_actions):
                if a not in sup:
                    br_rows.append([x - y for x, y in zip(value_row(k, a), base)])

        if sol.kind == "unique":
            q = sol.particular
            if any(x <= 0 for x in q):
                return None
            for row in br_rows:
                if sum((r * x for r, x in zip(row, q)), Fraction(0)) > 0:
                    return None
            return ("point", {c: q[j] for c, j in index.items()})

        # Parametric: the relatively open face is nonempty iff some point has
        # every support probability >= eps > 0 while satisfying the reply rows.
        part, basis = sol.particular, sol.null_basis
        d = len(basis)
        cons = []
        for j in range(nvar):
            cons.append(Constraint(tuple(basis[m][j] for m in range(d)) + (Fraction(-1),), GE, -part[j]))
        for row in br_rows:
            lhs = tuple(sum((row[j] * basis[m][j] for j in range(nvar)), Fraction(0)) for m in range(d))
            const = sum((row[j] * part[j] for j in range(nvar)), Fraction(0))
            cons.append(Constraint(lhs + (Fraction(0),), LE, -const))
        cons.append(Constraint((Fraction(0),) * d + (Fraction(1),), LE, Fraction(1)))
        out = lp_solve(LPProblem((Fraction(0),) * d + (Fraction(1),), tuple(cons)), "max")
        if not out.optimal or out.value <= 0:
            return None
        return ("family", coords, part, basis)


def _as_agent_form(game: Union[AgentFormGame, StrategicGame, BayesianGame]) -> AgentFormGame:
    if isinstance(game, AgentFormGame):
        af = game
    elif isinstance(game, BayesianGame):
        af = agent_form(game)
    elif isinstance(game, StrategicGame):
        af = agent_form(BayesianGame.from_strategic(game))
    else:
        raise TypeError(f"cannot enumerate equilibria of {type(game).__name__}")
    if af.bayesian.num_players != 2:
        raise GameError(
            f"support enumeration needs the bipartite agent structure of a two-player game; "
            f"got {af.bayesian.num_players} players"
        )
    return af


def _nonempty_subsets(n: int) -> list[tuple[int, ...]]:
    return [s for r in range(1, n + 1) for s in itertools.combinations(range(n), r)]


def enumerate_nash(game, workers: Optional[int] = None) -> EquilibriumSet:
    """Every Nash equilibrium of a two-player game's agent form.

    Walks all ``prod(2^|A_i| - 1)`` support profiles.  Isolated equilibria
    are returned as exact :class:`MixedProfile` objects over the agents and
    re-verified with :func:`is_nash`; solution families are returned as
    :class:`EquilibriumComponent` objects and never sampled.
    """
    af = _as_agent_form(game)
    sides = (_Side(af, 0), _Side(af, 1))
    agents = af.agents
    per_agent = [_nonempty_subsets(af.bayesian.shape[ag.player]) for ag in agents]
    regimes = list(itertools.product(*per_agent))
    offsets = []
    acc = 0
    for ag in agents:
        offsets.append(acc)
        acc += af.bayesian.shape[ag.player]
    width = acc

    def work(regime):
        support = dict(enumerate(regime))
        results = []
        for p in (0, 1):
            res = sides[p].solve(support, support)
            if res is None:
                return None
            results.append(res)
        return results

    def flatten(assign: dict) -> list[Fraction]:
        v = [Fraction(0)] * width
        for (l, b), x in assign.items():
            v[offsets[l] + b] = x
        return v

    isolated = {}
    components = []
    for regime, res in zip(regimes, pmap(work, regimes, workers)):
        if res is None:
            continue
        if all(r[0] == "point" for r in res):
            v = flatten({**res[0][1], **res[1][1]})
            prof = MixedProfile(tuple(
                tuple(v[offsets[k]:offsets[k] + af.bayesian.shape[ag.player]]) for k, ag in enumerate(agents)
            ))
            check = is_nash(af.game, prof)
            if not check:
                raise ArithmeticError(f"support regime {regime} produced a non-equilibrium")
            isolated[prof.key()] = prof
            continue
        part = [Fraction(0)] * width
        basis = []
        for r in res:
            if r[0] == "point":
                for (l, b), x in r[1].items():
                    part[offsets[l] + b] = x
            else:
                _, coords, p_, nb = r
                for (l, b), x in zip(coords, p_):
                    part[offsets[l] + b] = x
                for vec in nb:
                    full = [Fraction(0)] * width
                    for (l, b), x in zip(coords, vec):
                        full[offsets[l] + b] = x
                    basis.append(tuple(full))
        components.append(EquilibriumComponent(
            SupportProfile(tuple(regime)), tuple(part), tuple(basis),
            "support probabilities > 0; off-support replies no better than support",
        ))
    iso = tuple(isolated[k] for k in sorted(isolated))
    components.sort(key=lambda c: (c.support.supports, c.particular))
    return EquilibriumSet(iso, tuple(components), len(regimes))


def relabel_profile(profile: MixedProfile, player: int, perm: Sequence[int]) -> MixedProfile:
    """Profile in a game whose ``player`` actions were permuted by ``perm``."""
    old = profile.strategies[player]
    return profile.replace(player, tuple(old[p] for p in perm))
