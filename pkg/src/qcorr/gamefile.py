"""YAML game descriptions: parsing with line/column diagnostics and serialization.

Every scalar is read as raw text (``yes``/``no`` stay strings, ``1/9``
stays exact).  Layout::

    players: [P1, P2]
    actions: {P1: [no, yes], P2: [no, yes]}
    types: {P1: [A, B, C], P2: [A, B, C]}          # optional
    prior: uniform | [{types: [A, A], p: 1/9}, ...] # optional, common prior
    payoffs:
      default: [0, 0]                               # optional
      entries:
        - {types: [A, A], actions: [yes, yes], payoff: [-900, -900]}
    quantum:                                        # optional
      state: singlet | {amplitudes: [...], owners: [P1, P2]}
      menus: {P1: [{label: x, qubit: 0, direction: [1, 0, 0]}, ...], ...}
    profile:                                        # optional, needs quantum
      P1: {A: {measure: x, up: yes, down: no}, ...}
    agreement_table: [[0, 3/4, 3/4], ...]           # optional
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import yaml

from .bell import AgreementTable
from .exact import as_rational, format_rational
from .games import BayesianGame, GameError, StrategicGame
from .qce import AgentStrategy, QCEProfile, QCESetup
from .quantum import DOWN, INPUT_NORM_TOL, NORM_TOL, UP, MeasurementDirection, PureState, QuantumError, singlet

SINGLE_TYPE = "*"


class GameFileError(ValueError):
    def __init__(self, message: str, node: Optional[yaml.Node] = None, source: str = "<input>"):
        if node is not None:
            m = node.start_mark
            message = f"{source}:{m.line + 1}:{m.column + 1}: {message}"
        else:
            message = f"{source}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class GameFile:
    game: BayesianGame
    setup: Optional[QCESetup] = None
    profile: Optional[QCEProfile] = None
    table: Optional[AgreementTable] = None
    state_preset: Optional[str] = None

    @property
    def has_types(self) -> bool:
        return any(len(t) > 1 or t[0] != SINGLE_TYPE for t in self.game.type_labels)

    def strategic(self) -> StrategicGame:
        """The underlying strategic game of a type-free file."""
        if self.has_types:
            raise GameError("game has types; use the agent form")
        g = self.game
        return StrategicGame(g.players, g.action_labels, {a: g.payoffs[(0, a)] for (_, a) in g.payoffs})


class _Reader:
    def __init__(self, source: str):
        self.source = source

    def fail(self, msg, node=None):
        raise GameFileError(msg, node, self.source)

    def mapping(self, node, what) -> dict[str, tuple[yaml.Node, yaml.Node]]:
        if not isinstance(node, yaml.MappingNode):
            self.fail(f"{what} must be a mapping", node)
        out = {}
        for k, v in node.value:
            key = self.scalar(k, f"key in {what}")
            if key in out:
                self.fail(f"duplicate key {key!r} in {what}", k)
            out[key] = (k, v)
        return out

    def seq(self, node, what) -> list[yaml.Node]:
        if not isinstance(node, yaml.SequenceNode):
            self.fail(f"{what} must be a list", node)
        return list(node.value)

    def scalar(self, node, what) -> str:
        if not isinstance(node, yaml.ScalarNode):
            self.fail(f"{what} must be a scalar", node)
        return node.value

    def names(self, node, what) -> tuple[str, ...]:
        vals = tuple(self.scalar(n, what) for n in self.seq(node, what))
        if len(set(vals)) != len(vals):
            self.fail(f"duplicate names in {what}", node)
        if not vals:
            self.fail(f"{what} must not be empty", node)
        return vals

    def rational(self, node, what) -> Fraction:
        text = self.scalar(node, what)
        try:
            return as_rational(text)
        except (ValueError, TypeError, ZeroDivisionError):
            self.fail(f"{what}: {text!r} is not an exact rational", node)

    def real(self, node, what) -> float:
        text = self.scalar(node, what)
        try:
            return float(Fraction(text)) if "/" in text else float(text)
        except (ValueError, ZeroDivisionError):
            self.fail(f"{what}: {text!r} is not a number", node)

    def lookup(self, node, labels, what) -> int:
        name = self.scalar(node, what)
        if name not in labels:
            self.fail(f"unknown {what} {name!r} (expected one of {', '.join(labels)})", node)
        return labels.index(name)

    def per_player(self, node, players, what) -> list[yaml.Node]:
        m = self.mapping(node, what)
        for k, (kn, _) in m.items():
            if k not in players:
                self.fail(f"{what} names unknown player {k!r}", kn)
        missing = [p for p in players if p not in m]
        if missing:
            self.fail(f"{what} missing player(s) {', '.join(missing)}", node)
        return [m[p][1] for p in players]


def loads(text: str, source: str = "<input>") -> GameFile:
    """Parse a game description; errors carry ``source:line:col``."""
    r = _Reader(source)
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as e:
        m = e.problem_mark
        where = f"{source}:{m.line + 1}:{m.column + 1}" if m else source
        raise GameFileError(f"YAML syntax error at {where}: {e.problem}") from None
    if root is None:
        r.fail("empty game file")
    top = r.mapping(root, "game file")
    for k, (kn, _) in top.items():
        if k not in ("players", "actions", "types", "prior", "payoffs", "quantum", "profile", "agreement_table"):
            r.fail(f"unknown section {k!r}", kn)
    for need in ("players", "actions", "payoffs"):
        if need not in top:
            r.fail(f"missing section {need!r}", root)

    players = r.names(top["players"][1], "players")
    actions = tuple(r.names(n, "actions") for n in r.per_player(top["actions"][1], players, "actions"))
    if "types" in top:
        types = tuple(r.names(n, "types") for n in r.per_player(top["types"][1], players, "types"))
    else:
        types = tuple((SINGLE_TYPE,) for _ in players)
    profiles = list(itertools.product(*(range(len(t)) for t in types)))
    states = tuple(",".join(types[i][t] for i, t in enumerate(tp)) for tp in profiles)
    index = {tp: w for w, tp in enumerate(profiles)}

    def type_profile(node):
        names = r.seq(node, "types")
        if len(names) != len(players):
            r.fail(f"type profile needs {len(players)} entries", node)
        return tuple(r.lookup(n, types[i], f"type of {players[i]}") for i, n in enumerate(names))

    # prior
    if "prior" not in top or (isinstance(top["prior"][1], yaml.ScalarNode) and top["prior"][1].value == "uniform"):
        prior = [Fraction(1, len(profiles))] * len(profiles)
    else:
        pn = top["prior"][1]
        prior = [Fraction(0)] * len(profiles)
        seen = set()
        for e in r.seq(pn, "prior"):
            em = r.mapping(e, "prior entry")
            if set(em) != {"types", "p"}:
                r.fail("prior entries have exactly the keys 'types' and 'p'", e)
            tp = type_profile(em["types"][1])
            if tp in seen:
                r.fail("duplicate prior entry", e)
            seen.add(tp)
            p = r.rational(em["p"][1], "prior probability")
            if p < 0:
                r.fail("negative prior probability", em["p"][1])
            prior[index[tp]] = p
        if sum(prior) != 1:
            r.fail(f"prior sums to {format_rational(sum(prior))}, not 1", pn)

    # payoffs
    pm = r.mapping(top["payoffs"][1], "payoffs")
    for k, (kn, _) in pm.items():
        if k not in ("default", "entries"):
            r.fail(f"unknown key {k!r} in payoffs", kn)

    def vector(node):
        vals = r.seq(node, "payoff")
        if len(vals) != len(players):
            r.fail(f"payoff needs {len(players)} entries", node)
        return tuple(r.rational(v, "payoff") for v in vals)

    default = vector(pm["default"][1]) if "default" in pm else None
    table: dict = {}
    has_types = "types" in top
    for e in r.seq(pm["entries"][1], "payoff entries") if "entries" in pm else []:
        em = r.mapping(e, "payoff entry")
        allowed = {"types", "actions", "payoff"} if has_types else {"actions", "payoff"}
        for k, (kn, _) in em.items():
            if k not in allowed:
                r.fail(f"unexpected key {k!r} in payoff entry", kn)
        if "actions" not in em or "payoff" not in em or (has_types and "types" not in em):
            r.fail("payoff entry is missing " + ("types/" if has_types else "") + "actions/payoff", e)
        tp = type_profile(em["types"][1]) if has_types else (0,) * len(players)
        an = r.seq(em["actions"][1], "actions")
        if len(an) != len(players):
            r.fail(f"action profile needs {len(players)} entries", em["actions"][1])
        a = tuple(r.lookup(n, actions[i], f"action of {players[i]}") for i, n in enumerate(an))
        key = (index[tp], a)
        if key in table:
            r.fail("duplicate payoff entry", e)
        table[key] = vector(em["payoff"][1])
    for w in range(len(profiles)):
        for a in itertools.product(*(range(len(x)) for x in actions)):
            if (w, a) not in table:
                if default is None:
                    r.fail(f"no payoff for types {states[w]} and actions "
                           f"{','.join(actions[i][x] for i, x in enumerate(a))} and no default", top["payoffs"][1])
                table[(w, a)] = default

    signals = tuple(tuple(tp[i] for tp in profiles) for i in range(len(players)))
    try:
        game = BayesianGame(players, states, actions, types, signals, (tuple(prior),) * len(players), table)
    except GameError as e:
        r.fail(str(e), top["prior"][1] if "prior" in top else root)

    # quantum
    setup = preset = None
    if "quantum" in top:
        qm = r.mapping(top["quantum"][1], "quantum")
        if "state" not in qm or "menus" not in qm:
            r.fail("quantum section needs 'state' and 'menus'", top["quantum"][1])
        sn = qm["state"][1]
        try:
            if isinstance(sn, yaml.ScalarNode):
                if sn.value != "singlet":
                    r.fail(f"unknown state preset {sn.value!r}", sn)
                state, preset = singlet(), "singlet"
            else:
                sm = r.mapping(sn, "state")
                if set(sm) != {"amplitudes", "owners"}:
                    r.fail("state needs exactly 'amplitudes' and 'owners'", sn)
                amps = []
                for an in r.seq(sm["amplitudes"][1], "amplitudes"):
                    try:
                        amps.append(complex(r.scalar(an, "amplitude").replace(" ", "")))
                    except ValueError:
                        r.fail(f"bad amplitude {an.value!r}", an)
                owners = tuple(r.lookup(o, players, "qubit owner") for o in r.seq(sm["owners"][1], "owners"))
                vec = np.array(amps)
                norm = float(np.linalg.norm(vec))
                if abs(norm - 1) > INPUT_NORM_TOL:
                    r.fail(f"amplitudes have norm {norm:.9g}, expected 1", sm["amplitudes"][1])
                # keep exactly-normalized input bit for bit
                state = PureState(vec, owners) if abs(norm ** 2 - 1) <= NORM_TOL else PureState.normalized(vec, owners)
        except QuantumError as e:
            r.fail(str(e), sn)
        menus = []
        for i, mn in enumerate(r.per_player(qm["menus"][1], players, "menus")):
            menu = []
            for dn in r.seq(mn, f"menu of {players[i]}"):
                dm = r.mapping(dn, "measurement")
                if set(dm) - {"label", "qubit", "direction"} or "direction" not in dm or "qubit" not in dm:
                    r.fail("measurement needs 'qubit', 'direction' and optional 'label'", dn)
                label = r.scalar(dm["label"][1], "label") if "label" in dm else str(len(menu))
                try:
                    qubit = int(r.scalar(dm["qubit"][1], "qubit"))
                except ValueError:
                    r.fail("qubit must be an integer", dm["qubit"][1])
                vec = [r.real(x, "direction") for x in r.seq(dm["direction"][1], "direction")]
                try:
                    menu.append(MeasurementDirection.from_input(vec, qubit, label))
                except QuantumError as e:
                    r.fail(str(e), dm["direction"][1])
            if len({d.label for d in menu}) != len(menu):
                r.fail(f"duplicate measurement labels for {players[i]}", mn)
            menus.append(tuple(menu))
        try:
            setup = QCESetup(game, tuple(menus), state=state)
        except (QuantumError, GameError) as e:
            r.fail(str(e), qm["menus"][1])

    profile = None
    if "profile" in top:
        if setup is None:
            r.fail("profile section needs a quantum section", top["profile"][0])
        rows = []
        for i, pn in enumerate(r.per_player(top["profile"][1], players, "profile")):
            by_type = r.mapping(pn, f"profile of {players[i]}")
            row = []
            for t in types[i]:
                if t not in by_type:
                    r.fail(f"profile of {players[i]} missing type {t!r}", pn)
                sn = by_type[t][1]
                sm = r.mapping(sn, "strategy")
                if set(sm) != {"measure", "up", "down"}:
                    r.fail("strategy needs exactly 'measure', 'up' and 'down'", sn)
                labels = tuple(d.label for d in setup.menus[i])
                m = r.lookup(sm["measure"][1], labels, "measurement")
                pol = [0, 0]
                pol[UP] = r.lookup(sm["up"][1], actions[i], "action")
                pol[DOWN] = r.lookup(sm["down"][1], actions[i], "action")
                row.append(AgentStrategy(m, tuple(pol)))
            for t, (kn, _) in by_type.items():
                if t not in types[i]:
                    r.fail(f"unknown type {t!r}", kn)
            rows.append(tuple(row))
        profile = QCEProfile(tuple(rows))

    agreement = None
    if "agreement_table" in top:
        tn = top["agreement_table"][1]
        rows = [tuple(r.rational(x, "agreement probability") for x in r.seq(rn, "table row"))
                for rn in r.seq(tn, "agreement_table")]
        try:
            agreement = AgreementTable(tuple(rows))
        except ValueError as e:
            r.fail(str(e), tn)

    return GameFile(game, setup, profile, agreement, preset)


def load(path: str) -> GameFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise GameFileError(f"cannot read: {e.strerror}", source=path) from None
    except UnicodeDecodeError:
        raise GameFileError("not valid UTF-8", source=path) from None
    return loads(text, source=path)


# ---------------------------------------------------------------- serialize


def _q(s: str) -> str:
    return "'" + s.replace("'", "''") + "'"


def _flow(items) -> str:
    return "[" + ", ".join(items) + "]"


def dumps(gf: GameFile) -> str:
    """Canonical text form; ``loads(dumps(gf))`` rebuilds an identical game."""
    g = gf.game
    n = g.num_players
    lines = [f"players: {_flow(map(_q, g.players))}", "actions:"]
    lines += [f"  {_q(p)}: {_flow(map(_q, a))}" for p, a in zip(g.players, g.action_labels)]
    typed = gf.has_types
    if typed:
        lines.append("types:")
        lines += [f"  {_q(p)}: {_flow(map(_q, t))}" for p, t in zip(g.players, g.type_labels)]
        lines.append("prior:")
        for w in range(len(g.states)):
            tp = [g.type_labels[i][g.signals[i][w]] for i in range(n)]
            lines.append(f"  - {{types: {_flow(map(_q, tp))}, p: {_q(format_rational(g.priors[0][w]))}}}")
    lines += ["payoffs:", "  entries:"]
    for (w, a), u in sorted(g.payoffs.items()):
        acts = _flow(_q(g.action_labels[i][x]) for i, x in enumerate(a))
        pay = _flow(_q(format_rational(x)) for x in u)
        if typed:
            tp = _flow(_q(g.type_labels[i][g.signals[i][w]]) for i in range(n))
            lines.append(f"    - {{types: {tp}, actions: {acts}, payoff: {pay}}}")
        else:
            lines.append(f"    - {{actions: {acts}, payoff: {pay}}}")
    s = gf.setup
    if s is not None:
        lines.append("quantum:")
        if gf.state_preset == "singlet":
            lines.append("  state: singlet")
        else:
            amps = _flow(_q(repr(complex(x))) for x in s.state.amplitudes)
            owners = _flow(_q(g.players[o]) for o in s.state.owners)
            lines.append(f"  state: {{amplitudes: {amps}, owners: {owners}}}")
        lines.append("  menus:")
        for p, menu in zip(g.players, s.menus):
            lines.append(f"    {_q(p)}:")
            for d in menu:
                vec = _flow(_q(repr(x)) for x in d.direction)
                lines.append(f"      - {{label: {_q(d.label)}, qubit: {d.qubit}, direction: {vec}}}")
    if gf.profile is not None:
        lines.append("profile:")
        for i, p in enumerate(g.players):
            lines.append(f"  {_q(p)}:")
            for t, st in zip(g.type_labels[i], gf.profile.strategies[i]):
                lab = s.menus[i][st.measurement].label
                up, down = (g.action_labels[i][st.policy[o]] for o in (UP, DOWN))
                lines.append(f"    {_q(t)}: {{measure: {_q(lab)}, up: {_q(up)}, down: {_q(down)}}}")
    if gf.table is not None:
        lines.append("agreement_table:")
        for row in gf.table.entries:
            lines.append("  - " + _flow(_q(format_rational(x)) for x in row))
    return "\n".join(lines) + "\n"


def dump(gf: GameFile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(gf))
