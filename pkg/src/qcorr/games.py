"""Strategic games, Bayesian games and the agent-form reduction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .exact import as_rational

JointAction = tuple[int, ...]


class GameError(ValueError):
    """Raised for structurally invalid games or profiles."""


@dataclass(frozen=True)
class StrategicGame:
    """Finite strategic game with exact payoffs.

    Actions are referred to by index; ``action_labels`` only matter for
    display and file I/O.  ``payoffs`` maps every joint action to one
    payoff per player.
    """

    players: tuple[str, ...]
    action_labels: tuple[tuple[str, ...], ...]
    payoffs: Mapping[JointAction, tuple[Fraction, ...]]

    def __post_init__(self):
        if len(self.players) != len(self.action_labels):
            raise GameError("one action list per player required")
        if any(len(a) == 0 for a in self.action_labels):
            raise GameError("every player needs at least one action")
        table = {}
        for a in self.joint_actions():
            if a not in self.payoffs:
                raise GameError(f"payoff missing for joint action {a}")
            u = tuple(as_rational(v) for v in self.payoffs[a])
            if len(u) != self.num_players:
                raise GameError(f"payoff at {a} has {len(u)} entries")
            table[a] = u
        object.__setattr__(self, "payoffs", table)

    @property
    def num_players(self) -> int:
        return len(self.players)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.action_labels)

    def joint_actions(self):
        return itertools.product(*(range(k) for k in self.shape))

    def payoff(self, joint: JointAction) -> tuple[Fraction, ...]:
        return self.payoffs[tuple(joint)]

    @classmethod
    def from_function(cls, players, action_labels, fn) -> "StrategicGame":
        labels = tuple(tuple(a) for a in action_labels)
        shape = [range(len(a)) for a in labels]
        return cls(tuple(players), labels, {a: tuple(fn(a)) for a in itertools.product(*shape)})

    def permute_actions(self, player: int, perm: Sequence[int]) -> "StrategicGame":
        """Relabel: new action ``k`` of ``player`` is old action ``perm[k]``."""
        labels = list(self.action_labels)
        labels[player] = tuple(self.action_labels[player][p] for p in perm)

        def fn(a):
            old = list(a)
            old[player] = perm[a[player]]
            return self.payoffs[tuple(old)]

        return StrategicGame.from_function(self.players, labels, fn)


@dataclass(frozen=True)
class MixedProfile:
    """One exact probability distribution per player over its actions."""

    strategies: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        strat = tuple(tuple(as_rational(p) for p in s) for s in self.strategies)
        for i, s in enumerate(strat):
            if any(p < 0 for p in s):
                raise GameError(f"player {i} has a negative probability")
            if sum(s) != 1:
                raise GameError(f"player {i}'s strategy sums to {sum(s)}, not 1")
        object.__setattr__(self, "strategies", strat)

    @classmethod
    def pure(cls, game: StrategicGame, joint: JointAction) -> "MixedProfile":
        return cls(tuple(
            tuple(Fraction(int(k == a)) for k in range(n)) for a, n in zip(joint, game.shape)
        ))

    def support(self, player: int) -> tuple[int, ...]:
        return tuple(k for k, p in enumerate(self.strategies[player]) if p > 0)

    def is_pure(self) -> bool:
        return all(len(self.support(i)) == 1 for i in range(len(self.strategies)))

    def as_pure(self) -> Optional[JointAction]:
        if not self.is_pure():
            return None
        return tuple(self.support(i)[0] for i in range(len(self.strategies)))

    def replace(self, player: int, dist: Sequence[Fraction]) -> "MixedProfile":
        s = list(self.strategies)
        s[player] = tuple(dist)
        return MixedProfile(tuple(s))

    def key(self) -> tuple:
        return self.strategies


def _check_profile(game: StrategicGame, profile: MixedProfile) -> None:
    if len(profile.strategies) != game.num_players:
        raise GameError("profile has the wrong number of players")
    for s, n in zip(profile.strategies, game.shape):
        if len(s) != n:
            raise GameError("profile dimensions do not match the game")


def expected_payoff(game: StrategicGame, profile: MixedProfile) -> tuple[Fraction, ...]:
    """Exact multilinear expectation of every player's payoff."""
    _check_profile(game, profile)
    supports = [profile.support(i) for i in range(game.num_players)]
    total = [Fraction(0)] * game.num_players
    for a in itertools.product(*supports):
        w = Fraction(1)
        for i, ai in enumerate(a):
            w *= profile.strategies[i][ai]
        for i, u in enumerate(game.payoffs[a]):
            if u:
                total[i] += w * u
    return tuple(total)


def action_values(game: StrategicGame, profile: MixedProfile, player: int) -> tuple[Fraction, ...]:
    """Expected payoff of each pure action of ``player`` against the others' mixtures."""
    _check_profile(game, profile)
    others = [profile.support(j) if j != player else (None,) for j in range(game.num_players)]
    values = [Fraction(0)] * game.shape[player]
    for rest in itertools.product(*others):
        w = Fraction(1)
        for j, aj in enumerate(rest):
            if j != player:
                w *= profile.strategies[j][aj]
        a = list(rest)
        for k in range(game.shape[player]):
            a[player] = k
            u = game.payoffs[tuple(a)][player]
            if u:
                values[k] += w * u
    return tuple(values)


# ------------------------------------------------------------------ Bayesian


@dataclass(frozen=True)
class BayesianGame:
    """Bayesian game in strategic form.

    ``signals[i][w]`` is the type index of player ``i`` in state ``w``;
    ``priors[i]`` is player ``i``'s belief over states; ``payoffs`` maps
    ``(state, joint action)`` to one payoff per player.
    """

    players: tuple[str, ...]
    states: tuple[str, ...]
    action_labels: tuple[tuple[str, ...], ...]
    type_labels: tuple[tuple[str, ...], ...]
    signals: tuple[tuple[int, ...], ...]
    priors: tuple[tuple[Fraction, ...], ...]
    payoffs: Mapping[tuple[int, JointAction], tuple[Fraction, ...]]

    def __post_init__(self):
        n = len(self.players)
        if not (len(self.action_labels) == len(self.type_labels) == len(self.signals) == len(self.priors) == n):
            raise GameError("per-player data must have one entry per player")
        if any(len(a) == 0 for a in self.action_labels):
            raise GameError("every player needs at least one action")
        ns = len(self.states)
        priors = tuple(tuple(as_rational(p) for p in pr) for pr in self.priors)
        for i in range(n):
            if len(self.signals[i]) != ns:
                raise GameError(f"signal function of {self.players[i]} is not total")
            if len(priors[i]) != ns:
                raise GameError(f"prior of {self.players[i]} has the wrong length")
            if any(p < 0 for p in priors[i]) or sum(priors[i]) != 1:
                raise GameError(f"prior of {self.players[i]} is not a distribution")
            for t in range(len(self.type_labels[i])):
                mass = sum((priors[i][w] for w in range(ns) if self.signals[i][w] == t), Fraction(0))
                if mass <= 0:
                    raise GameError(
                        f"type {self.type_labels[i][t]!r} of {self.players[i]} has zero prior probability"
                    )
            if any(not 0 <= t < len(self.type_labels[i]) for t in self.signals[i]):
                raise GameError(f"signal function of {self.players[i]} has an out-of-range type")
        table = {}
        shape = [range(len(a)) for a in self.action_labels]
        for w in range(ns):
            for a in itertools.product(*shape):
                if (w, a) not in self.payoffs:
                    raise GameError(f"payoff missing for state {self.states[w]!r}, actions {a}")
                u = tuple(as_rational(v) for v in self.payoffs[(w, a)])
                if len(u) != n:
                    raise GameError("payoff vector length differs from player count")
                table[(w, a)] = u
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "payoffs", table)

    @property
    def num_players(self) -> int:
        return len(self.players)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.action_labels)

    def type_probability(self, player: int, t: int) -> Fraction:
        return sum((p for p, s in zip(self.priors[player], self.signals[player]) if s == t), Fraction(0))

    def conditional(self, player: int, t: int) -> list[tuple[int, Fraction]]:
        """States consistent with ``player`` having type ``t``, with posterior weights."""
        mass = self.type_probability(player, t)
        return [(w, p / mass) for w, (p, s) in enumerate(zip(self.priors[player], self.signals[player]))
                if s == t and p > 0]

    def common_prior(self) -> Optional[tuple[Fraction, ...]]:
        first = self.priors[0]
        return first if all(p == first for p in self.priors) else None

    @classmethod
    def from_strategic(cls, game: StrategicGame) -> "BayesianGame":
        """A Bayesian game with one state and one type per player."""
        n = game.num_players
        return cls(
            game.players, ("*",), game.action_labels, (("*",),) * n, ((0,),) * n,
            ((Fraction(1),),) * n, {(0, a): u for a, u in game.payoffs.items()},
        )


@dataclass(frozen=True)
class Agent:
    player: int
    type: int


@dataclass(frozen=True)
class AgentFormGame:
    """Strategic game whose players are the (player, type) pairs of a Bayesian game."""

    bayesian: BayesianGame
    game: StrategicGame
    agents: tuple[Agent, ...]

    def agents_of(self, player: int) -> list[int]:
        return [k for k, ag in enumerate(self.agents) if ag.player == player]

    def agent_index(self, player: int, t: int) -> int:
        return self.agents.index(Agent(player, t))

    def behavioral(self, per_player: Sequence[Sequence[int]]) -> JointAction:
        """Joint agent action from per-player ``type -> action`` lists."""
        return tuple(per_player[ag.player][ag.type] for ag in self.agents)

    def player_payoffs(self, profile: MixedProfile) -> tuple[Fraction, ...]:
        """Prior-expected payoff of each original player.

        Agent payoffs are conditional expectations, so the player-level view
        weights them by each type's prior probability.
        """
        agent_u = expected_payoff(self.game, profile)
        bg = self.bayesian
        out = [Fraction(0)] * bg.num_players
        for k, ag in enumerate(self.agents):
            out[ag.player] += bg.type_probability(ag.player, ag.type) * agent_u[k]
        return tuple(out)

    def player_payoffs_pure(self, joint: JointAction) -> tuple[Fraction, ...]:
        return self.player_payoffs(MixedProfile.pure(self.game, joint))


def agent_form(game: BayesianGame) -> AgentFormGame:
    """Reduce a Bayesian game to its agent form.

    Agent ``(i, t)`` has player ``i``'s actions and receives the conditional
    expectation of ``u_i`` given type ``t``.  In each state only the agents
    whose types are realized contribute to the joint action.
    """
    agents = tuple(Agent(i, t) for i in range(game.num_players) for t in range(len(game.type_labels[i])))
    names = tuple(f"{game.players[ag.player]}:{game.type_labels[ag.player][ag.type]}" for ag in agents)
    labels = tuple(game.action_labels[ag.player] for ag in agents)
    index = {ag: k for k, ag in enumerate(agents)}
    posteriors = {ag: game.conditional(ag.player, ag.type) for ag in agents}

    def realized(joint, w):
        return tuple(joint[index[Agent(i, game.signals[i][w])]] for i in range(game.num_players))

    def fn(joint):
        out = []
        for ag in agents:
            total = Fraction(0)
            for w, p in posteriors[ag]:
                u = game.payoffs[(w, realized(joint, w))][ag.player]
                if u:
                    total += p * u
            out.append(total)
        return out

    return AgentFormGame(game, StrategicGame.from_function(names, labels, fn), agents)


TYPE_NAMES = ("A", "B", "C")
NO, YES = 0, 1


def build_example_game(same_type_agree=-900, different_type_agree=9, disagree=0) -> BayesianGame:
    """The two-player yes/no coordination game with three i.i.d. uniform types.

    States are the nine ordered type pairs, each with probability 1/9.
    Agreeing with an opponent of your own type is catastrophic.
    """
    pairs = list(itertools.product(range(3), repeat=2))
    states = tuple(f"{TYPE_NAMES[a]},{TYPE_NAMES[b]}" for a, b in pairs)
    prior = tuple(Fraction(1, 9) for _ in pairs)
    payoffs = {}
    for w, (t1, t2) in enumerate(pairs):
        for a in itertools.product((NO, YES), repeat=2):
            if a[0] != a[1]:
                u = disagree
            elif t1 == t2:
                u = same_type_agree
            else:
                u = different_type_agree
            payoffs[(w, a)] = (u, u)
    return BayesianGame(
        players=("P1", "P2"),
        states=states,
        action_labels=(("no", "yes"), ("no", "yes")),
        type_labels=(TYPE_NAMES, TYPE_NAMES),
        signals=(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)),
        priors=(prior, prior),
        payoffs=payoffs,
    )


# Rows a..h of the catastrophe-free strategy table: player 1 by type (A, B, C),
# player 2 plays the complement.
EXAMPLE_PURE_PROFILES = {
    name: (bits, tuple(1 - b for b in bits))
    for name, bits in zip("abcdefgh", itertools.product((0, 1), repeat=3))
}
