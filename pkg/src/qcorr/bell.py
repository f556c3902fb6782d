"""Local-hidden-variable models for agreement tables, Bell-type certificates
and CHSH values."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .exact import EQ, LE, Constraint, LPProblem, as_rational, lp_solve, verify_farkas
from .quantum import MeasurementDirection, PureState, correlation_value

Response = tuple[int, ...]  # type index -> announced bit


@dataclass(frozen=True)
class AgreementTable:
    """``entries[t1][t2]`` = P(both players announce the same bit | types t1, t2)."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_rational(x) for x in r) for r in self.entries)
        k = len(rows)
        if k == 0 or any(len(r) != k for r in rows):
            raise ValueError("agreement table must be a nonempty square matrix")
        for r in rows:
            for x in r:
                if not 0 <= x <= 1:
                    raise ValueError(f"agreement probability {x} outside [0, 1]")
        object.__setattr__(self, "entries", rows)

    @property
    def size(self) -> int:
        return len(self.entries)

    @classmethod
    def parse(cls, text: str) -> "AgreementTable":
        """``"0,3/4,3/4;3/4,0,3/4;3/4,3/4,0"``: rows split by ``;``, entries by ``,``."""
        rows = [r for r in (s.strip() for s in text.strip().split(";")) if r]
        return cls(tuple(tuple(as_rational(x.strip()) for x in r.split(",")) for r in rows))

    @classmethod
    def uniform(cls, k: int, diag, off) -> "AgreementTable":
        return cls(tuple(tuple(diag if i == j else off for j in range(k)) for i in range(k)))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.entries[ij[0]][ij[1]]


def responses(k: int) -> list[Response]:
    """All deterministic maps from ``k`` types to a bit, in lexicographic order."""
    return list(itertools.product((0, 1), repeat=k))


def _pairs(k: int) -> list[tuple[Response, Response]]:
    return [(f, g) for f in responses(k) for g in responses(k)]


@dataclass(frozen=True)
class LHVModel:
    """Distribution over pairs ``(f, g)`` of deterministic response functions."""

    weights: Mapping[tuple[Response, Response], Fraction]
    num_types: int

    def __post_init__(self):
        w = {(tuple(f), tuple(g)): as_rational(p) for (f, g), p in self.weights.items()}
        if any(p < 0 for p in w.values()) or sum(w.values()) != 1:
            raise ValueError("LHV weights must form a probability distribution")
        if any(len(f) != self.num_types or len(g) != self.num_types for f, g in w):
            raise ValueError("response functions must cover every type")
        object.__setattr__(self, "weights", {k: v for k, v in sorted(w.items()) if v})

    def table(self) -> AgreementTable:
        k = self.num_types
        return AgreementTable(tuple(
            tuple(sum((p for (f, g), p in self.weights.items() if f[i] == g[j]), Fraction(0))
                  for j in range(k))
            for i in range(k)
        ))


@dataclass(frozen=True)
class BellInequality:
    """``sum_ij coefficients[i][j] * P(i, j) + constant >= 0`` for every LHV model."""

    coefficients: tuple[tuple[int, ...], ...]
    constant: int

    def value(self, table: AgreementTable) -> Fraction:
        return sum((c * table[i, j] for i, r in enumerate(self.coefficients) for j, c in enumerate(r)),
                   Fraction(self.constant))

    def violated_by(self, table: AgreementTable) -> bool:
        return self.value(table) < 0

    def holds_for_all_deterministic(self) -> bool:
        k = len(self.coefficients)
        for f, g in _pairs(k):
            v = self.constant + sum(self.coefficients[i][j] for i in range(k) for j in range(k) if f[i] == g[j])
            if v < 0:
                return False
        return True

    def __str__(self) -> str:
        terms = []
        for i, r in enumerate(self.coefficients):
            for j, c in enumerate(r):
                if c:
                    terms.append(f"{c:+d}*P({i},{j})")
        return " ".join(terms) + f" {self.constant:+d} >= 0"


@dataclass(frozen=True)
class LHVResult:
    feasible: bool
    model: Optional[LHVModel] = None
    inequality: Optional[BellInequality] = None
    certificate: Optional[tuple[Fraction, ...]] = None
    violation: Optional[Fraction] = None


def _lhv_problem(table: AgreementTable) -> tuple[LPProblem, list]:
    k = table.size
    cols = _pairs(k)
    cons = [Constraint((Fraction(1),) * len(cols), EQ, Fraction(1))]
    for i in range(k):
        for j in range(k):
            row = tuple(Fraction(int(f[i] == g[j])) for f, g in cols)
            cons.append(Constraint(row, EQ, table[i, j]))
    return LPProblem.nonnegative((Fraction(0),) * len(cols), cons), cols


def lhv_feasible(table: Union[AgreementTable, Sequence[Sequence]]) -> LHVResult:
    """Exact LP: can shared classical randomness reproduce the table?

    On infeasibility the Farkas multipliers ``(y0, y_ij)`` of the
    normalization and agreement rows give ``y0 + sum y_ij * [f(i)=g(j)] >= 0``
    at every deterministic pair, hence for all LHV models, while the table
    makes the same expression negative.  Scaled to coprime integers this is
    the reported Bell-type inequality.
    """
    if not isinstance(table, AgreementTable):
        table = AgreementTable(tuple(tuple(r) for r in table))
    prob, cols = _lhv_problem(table)
    out = lp_solve(prob, "max")
    if out.optimal:
        model = LHVModel({c: x for c, x in zip(cols, out.x) if x}, table.size)
        return LHVResult(True, model=model)
    cert = out.certificate
    assert verify_farkas(prob, cert)
    k = table.size
    y0, ys = cert[0], cert[1:1 + k * k]
    scale = math.lcm(*(q.denominator for q in (y0, *ys)))
    ints = [int(q * scale) for q in (y0, *ys)]
    g = math.gcd(*ints) or 1
    ints = [v // g for v in ints]
    ineq = BellInequality(tuple(tuple(ints[1 + i * k + j] for j in range(k)) for i in range(k)), ints[0])
    return LHVResult(False, inequality=ineq, certificate=cert, violation=ineq.value(table))


def max_classical_agreement(diag_constraint, criterion: str = "average", num_types: int = 3) -> Fraction:
    """Largest off-diagonal agreement an LHV model reaches with every diagonal
    entry at most ``diag_constraint``; ``criterion`` is ``"average"`` or ``"minimum"``."""
    d = as_rational(diag_constraint)
    if not 0 <= d <= 1:
        raise ValueError("diagonal constraint must lie in [0, 1]")
    if criterion not in ("average", "minimum"):
        raise ValueError("criterion must be 'average' or 'minimum'")
    k = num_types
    if k < 2:
        raise ValueError("need at least two types for off-diagonal entries")
    cols = _pairs(k)
    n = len(cols)
    extra = 1 if criterion == "minimum" else 0

    def agree(i, j):
        return [Fraction(int(f[i] == g[j])) for f, g in cols]

    cons = [Constraint((Fraction(1),) * n + (Fraction(0),) * extra, EQ, Fraction(1))]
    for i in range(k):
        cons.append(Constraint(tuple(agree(i, i)) + (Fraction(0),) * extra, LE, d))
    off = [(i, j) for i in range(k) for j in range(k) if i != j]
    if criterion == "average":
        obj = [Fraction(0)] * n
        for i, j in off:
            for c, a in enumerate(agree(i, j)):
                obj[c] += a / len(off)
        prob = LPProblem.nonnegative(obj, cons)
    else:
        for i, j in off:
            # s - P(i, j) <= 0
            cons.append(Constraint(tuple(-a for a in agree(i, j)) + (Fraction(1),), LE, Fraction(0)))
        prob = LPProblem.nonnegative((Fraction(0),) * n + (Fraction(1),), cons)
    out = lp_solve(prob, "max")
    if not out.optimal:
        raise ArithmeticError(f"agreement LP returned {out.status.value}")
    return out.value


def classical_payoff_bound(max_agreement, different_type_mass=Fraction(6, 9), reward=9) -> Fraction:
    """Per-player payoff cap when same-type agreement is ruled out."""
    return as_rational(different_type_mass) * as_rational(max_agreement) * as_rational(reward)


# ----------------------------------------------------------------------- CHSH


def chsh_value(state: PureState, a: MeasurementDirection, a2: MeasurementDirection,
               b: MeasurementDirection, b2: MeasurementDirection) -> float:
    """S = E(a,b) - E(a,b') + E(a',b) + E(a',b')."""
    return (correlation_value(state, a, b) - correlation_value(state, a, b2)
            + correlation_value(state, a2, b) + correlation_value(state, a2, b2))


def deterministic_chsh_values() -> list[int]:
    """S for each of the 16 deterministic +-1 assignments to (A, A', B, B')."""
    out = []
    for A, A2, B, B2 in itertools.product((1, -1), repeat=4):
        out.append(A * B - A * B2 + A2 * B + A2 * B2)
    return out


def planar_direction(deg: float, qubit: int, label: str) -> MeasurementDirection:
    r = math.radians(deg)
    return MeasurementDirection((math.cos(r), 0.0, math.sin(r)), qubit, label)


def standard_chsh_axes() -> tuple[MeasurementDirection, ...]:
    """a = 0, a' = 90, b = 45, b' = 135 degrees in the x-z plane."""
    return (planar_direction(0, 0, "a"), planar_direction(90, 0, "a'"), planar_direction(45, 1, "b"), planar_direction(135, 1, "b'"))
