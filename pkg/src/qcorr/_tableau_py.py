"""Pure-Python simplex tableau over :class:`fractions.Fraction`.

Reference implementation of the kernel API; ``qcorr._tableau`` (Cython +
GMP) mirrors it operation for operation, so both backends visit the same
bases and return identical results.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

_ZERO = Fraction(0)


class Tableau:
    """``A z = b`` with ``b >= 0``, one artificial column per row as the start basis.

    Columns ``0..n-1`` are structural, ``n..n+m-1`` artificial, the last
    column holds the right-hand side.  ``obj`` is the reduced-cost row with
    ``-value`` in its last slot.
    """

    def __init__(self, rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
        self.m = len(rows)
        self.n = len(rows[0]) if rows else 0
        m = self.m
        self.T = [list(row) + [Fraction(int(i == k)) for k in range(m)] + [b]
                  for i, (row, b) in enumerate(zip(rows, rhs))]
        self.basis = [self.n + i for i in range(m)]
        self.obj = [_ZERO] * (self.n + m + 1)
        self.pivots = 0

    def set_objective(self, cost: Sequence[Fraction]) -> None:
        """Load a cost vector over all ``n + m`` columns and price out the basis."""
        obj = list(cost) + [_ZERO]
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb != 0:
                for j, v in enumerate(self.T[i]):
                    if v != 0:
                        obj[j] -= cb * v
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        inv = 1 / T[r][c]
        prow = [v * inv if v else v for v in T[r]]
        T[r] = prow
        nz = [j for j, v in enumerate(prow) if v != 0]
        for i in range(self.m):
            if i != r:
                f = T[i][c]
                if f != 0:
                    row = T[i]
                    for j in nz:
                        row[j] -= f * prow[j]
        f = self.obj[c]
        if f != 0:
            obj = self.obj
            for j in nz:
                obj[j] -= f * prow[j]
        self.basis[r] = c
        self.pivots += 1

    def run(self, allowed: int, bland_only: bool) -> bool:
        """Pivot to optimality over columns ``< allowed``; False if unbounded."""
        obj = self.obj
        bland = bland_only
        while True:
            c = -1
            if bland:
                for j in range(allowed):
                    if obj[j] < 0:
                        c = j
                        break
            else:
                best_d = _ZERO
                for j in range(allowed):
                    if obj[j] < best_d:
                        c, best_d = j, obj[j]
            if c < 0:
                return True
            r = -1
            best_ratio = None
            for i in range(self.m):
                a = self.T[i][c]
                if a > 0:
                    ratio = self.T[i][-1] / a
                    if (r < 0 or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[i] < self.basis[r])):
                        r, best_ratio = i, ratio
            if r < 0:
                return False
            if not bland_only:
                bland = best_ratio == 0
            self.pivot(r, c)

    def entry(self, i: int, j: int) -> Fraction:
        return self.T[i][j]

    def obj_entry(self, j: int) -> Fraction:
        return self.obj[j]

    def rhs(self) -> list[Fraction]:
        return [row[-1] for row in self.T]

    def row_nonzero(self, i: int, upto: int) -> int:
        """First column ``< upto`` with a nonzero entry in row ``i``, or -1."""
        row = self.T[i]
        for j in range(upto):
            if row[j] != 0:
                return j
        return -1

    def drop_row(self, i: int) -> None:
        """Remove row ``i`` by moving the last row into its place."""
        last = self.m - 1
        self.T[i] = self.T[last]
        self.basis[i] = self.basis[last]
        self.T.pop()
        self.basis.pop()
        self.m -= 1
