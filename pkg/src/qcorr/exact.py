"""Exact rational linear algebra and a two-phase simplex solver.

All arithmetic is done on :class:`fractions.Fraction`, so every pivot,
every optimum and every infeasibility certificate is exact.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .kernels import tableau_class

Rational = Fraction

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = (LE, EQ, GE)


def as_rational(value) -> Fraction:
    """Coerce ints, ``"p/q"`` / decimal strings and Fractions to a Fraction.

    Floats are rejected; they would silently carry binary rounding into
    exact computations.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------- linear solve


@dataclass(frozen=True)
class SolutionSet:
    """Result of :func:`linear_solve`.

    ``kind`` is ``"unique"``, ``"parametric"`` or ``"inconsistent"``.  For a
    parametric family every solution is ``particular + sum(t_k * null_basis[k])``;
    the particular solution has all free variables set to zero and each null
    vector has a positive leading entry.
    """

    kind: str
    particular: Optional[tuple[Fraction, ...]] = None
    null_basis: tuple[tuple[Fraction, ...], ...] = ()

    @property
    def consistent(self) -> bool:
        return self.kind != "inconsistent"


def rref(matrix: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns of an augmented matrix."""
    m = [list(map(as_rational, row)) for row in matrix]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        nz = [j for j in range(ncols) if m[r][j] != 0]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                row = m[i]
                for j in nz:
                    row[j] -= f * m[r][j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def linear_solve(matrix: Sequence[Sequence], rhs: Sequence) -> SolutionSet:
    """Solve ``matrix @ x = rhs`` exactly by Gauss-Jordan elimination."""
    if len(matrix) != len(rhs):
        raise ValueError(f"matrix has {len(matrix)} rows but rhs has {len(rhs)} entries")
    widths = {len(row) for row in matrix}
    if len(widths) > 1:
        raise ValueError("matrix rows have different lengths")
    n = widths.pop() if widths else 0
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    if n in pivots:
        return SolutionSet("inconsistent")
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = red[r][n]
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return SolutionSet("unique", tuple(x))
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        lead = next(e for e in v if e != 0)
        if lead < 0:
            v = [-e for e in v]
        basis.append(tuple(v))
    return SolutionSet("parametric", tuple(x), tuple(basis))


# ----------------------------------------------------------------------- LP


class LPStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", as_rational(self.rhs))

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = sum((a * v for a, v in zip(self.coeffs, x) if a), Fraction(0))
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LPProblem:
    """A linear program over exact rationals.

    Variables without bounds are free.  ``bounds[j]`` is a ``(lower, upper)``
    pair where either side may be ``None``.
    """

    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...] = ()
    bounds: tuple[tuple[Optional[Fraction], Optional[Fraction]], ...] = ()

    def __post_init__(self):
        obj = tuple(as_rational(c) for c in self.objective)
        object.__setattr__(self, "objective", obj)
        cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints)
        object.__setattr__(self, "constraints", cons)
        n = len(obj)
        for k, c in enumerate(cons):
            if len(c.coeffs) != n:
                raise ValueError(f"constraint {k} has {len(c.coeffs)} coefficients, expected {n}")
        bounds = tuple(self.bounds) or ((None, None),) * n
        if len(bounds) != n:
            raise ValueError(f"got {len(bounds)} bounds for {n} variables")
        bounds = tuple(
            (None if lo is None else as_rational(lo), None if hi is None else as_rational(hi))
            for lo, hi in bounds
        )
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @classmethod
    def nonnegative(cls, objective, constraints=()) -> "LPProblem":
        """Convenience constructor with every variable bounded below by zero."""
        return cls(tuple(objective), tuple(constraints), ((Fraction(0), None),) * len(objective))

    def certificate_rows(self) -> list[Constraint]:
        """Constraints followed by one row per finite bound, in variable order.

        Infeasibility certificates are indexed against this list.
        """
        rows = list(self.constraints)
        n = self.num_vars
        for j, (lo, hi) in enumerate(self.bounds):
            unit = tuple(Fraction(int(i == j)) for i in range(n))
            if lo is not None:
                rows.append(Constraint(unit, GE, lo))
            if hi is not None:
                rows.append(Constraint(unit, LE, hi))
        return rows

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        return len(x) == self.num_vars and all(r.holds(x) for r in self.certificate_rows())


@dataclass(frozen=True)
class LPOutcome:
    status: LPStatus
    value: Optional[Fraction] = None
    x: Optional[tuple[Fraction, ...]] = None
    certificate: Optional[tuple[Fraction, ...]] = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL

    @property
    def infeasible(self) -> bool:
        return self.status is LPStatus.INFEASIBLE


def verify_farkas(problem: LPProblem, certificate: Sequence[Fraction]) -> bool:
    """Check an infeasibility certificate by exact recombination.

    The multipliers must be >= 0 on ``<=`` rows, <= 0 on ``>=`` rows and
    free on equalities; combining the rows must cancel every variable and
    leave the contradiction ``0 <= negative``.
    """
    rows = problem.certificate_rows()
    if len(certificate) != len(rows):
        return False
    combo = [Fraction(0)] * problem.num_vars
    rhs = Fraction(0)
    for y, row in zip(certificate, rows):
        if (row.relation == LE and y < 0) or (row.relation == GE and y > 0):
            return False
        if y == 0:
            continue
        for j, a in enumerate(row.coeffs):
            if a:
                combo[j] += y * a
        rhs += y * row.rhs
    return all(c == 0 for c in combo) and rhs < 0


def lp_solve(problem: LPProblem, sense: str = "max", rule: str = "hybrid",
             backend: Optional[str] = None) -> LPOutcome:
    """Solve an :class:`LPProblem` exactly with the two-phase simplex method.

    ``rule="bland"`` always enters the lowest-index improving column;
    ``rule="hybrid"`` enters the most negative reduced cost but switches to
    Bland's choice after every degenerate pivot until the objective moves
    again.  Cycling needs an unbroken run of degenerate pivots, which is then
    governed by Bland's rule, so both rules terminate.

    Infeasible problems come back with a Farkas certificate over
    :meth:`LPProblem.certificate_rows`.  ``backend`` picks the tableau kernel
    (see :mod:`qcorr.kernels`).
    """
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    if rule not in ("hybrid", "bland"):
        raise ValueError("rule must be 'hybrid' or 'bland'")
    n = problem.num_vars

    # Column map: each original variable becomes one or two nonnegative columns.
    # x_j = shift_j + sum(sign * z_col)
    columns: list[tuple[int, int]] = []  # (variable, sign)
    shift = [Fraction(0)] * n
    extra_rows: list[Constraint] = []
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo is not None:
            shift[j] = lo
            columns.append((j, 1))
            if hi is not None:
                unit = tuple(Fraction(int(i == j)) for i in range(n))
                extra_rows.append(Constraint(unit, LE, hi))
        elif hi is not None:
            shift[j] = hi
            columns.append((j, -1))
        else:
            columns.append((j, 1))
            columns.append((j, -1))
    source_rows = list(problem.constraints) + extra_rows
    if not source_rows:
        source_rows.append(Constraint((0,) * n, EQ, 0))
    n_struct = len(columns)
    slack_of = {}
    for k, row in enumerate(source_rows):
        if row.relation != EQ:
            slack_of[k] = n_struct + len(slack_of)
    width = n_struct + len(slack_of)

    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    signs: list[int] = []
    for k, row in enumerate(source_rows):
        line = [Fraction(0)] * width
        for col, (j, s) in enumerate(columns):
            a = row.coeffs[j]
            if a:
                line[col] = a * s
        if k in slack_of:
            line[slack_of[k]] = Fraction(1 if row.relation == LE else -1)
        rhs = row.rhs - sum((row.coeffs[j] * shift[j] for j in range(n) if row.coeffs[j]), Fraction(0))
        s = 1
        if rhs < 0:
            s = -1
            line = [-v for v in line]
            rhs = -rhs
        A.append(line)
        b.append(rhs)
        signs.append(s)

    def recover(tab) -> tuple[Fraction, ...]:
        z = [Fraction(0)] * width
        for bv, v in zip(tab.basis, tab.rhs()):
            if bv < width:
                z[bv] = v
        x = list(shift)
        for col, (j, s) in enumerate(columns):
            if z[col]:
                x[j] += s * z[col]
        return tuple(x)

    tab = tableau_class(backend)(A, b)
    m = tab.m
    bland_only = rule == "bland"
    tab.set_objective([Fraction(0)] * width + [Fraction(1)] * m)
    tab.run(width + m, bland_only)
    if -tab.obj_entry(-1) > 0:
        # Phase-1 duals w_i = 1 - reduced cost of artificial i give a Farkas ray
        # for the standard-form rows; map it back with the row signs and fill in
        # the multipliers of bounds that were absorbed into the column map.
        w = [1 - tab.obj_entry(width + i) for i in range(m)]
        y_rows = [-s * wi for s, wi in zip(signs, w)]
        cert = _expand_certificate(problem, y_rows, len(problem.constraints))
        if not verify_farkas(problem, cert):
            raise ArithmeticError("internal error: phase-1 certificate failed verification")
        return LPOutcome(LPStatus.INFEASIBLE, certificate=cert, pivots=tab.pivots)

    # Drive zero-level artificials out of the basis; drop redundant rows.
    for i in reversed(range(tab.m)):
        if tab.basis[i] >= width:
            c = tab.row_nonzero(i, width)
            if c < 0:
                tab.drop_row(i)
            else:
                tab.pivot(i, c)

    cost = [Fraction(0)] * (width + m)
    sgn = -1 if sense == "max" else 1
    for col, (j, s) in enumerate(columns):
        cost[col] = sgn * s * problem.objective[j]
    tab.set_objective(cost)
    if not tab.run(width, bland_only):
        return LPOutcome(LPStatus.UNBOUNDED, pivots=tab.pivots)
    x = recover(tab)
    value = sum((c * v for c, v in zip(problem.objective, x)), Fraction(0))
    return LPOutcome(LPStatus.OPTIMAL, value=value, x=x, pivots=tab.pivots)


def _expand_certificate(problem: LPProblem, y_rows: list[Fraction], n_cons: int) -> tuple[Fraction, ...]:
    """Turn multipliers on (constraints + upper-bound rows) into a full certificate."""
    n = problem.num_vars
    y_cons = y_rows[:n_cons]
    extra = iter(y_rows[n_cons:])
    combo = [Fraction(0)] * n
    for y, row in zip(y_cons, problem.constraints):
        if y:
            for j, a in enumerate(row.coeffs):
                if a:
                    combo[j] += y * a
    cert = list(y_cons)
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo is not None and hi is not None:
            y_hi = next(extra)
            combo[j] += y_hi
            cert.append(-combo[j])
            cert.append(y_hi)
        elif lo is not None:
            cert.append(-combo[j])
        elif hi is not None:
            cert.append(-combo[j])
    return tuple(cert)
