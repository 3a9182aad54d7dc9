"""Exact-rational phase-1 simplex for equality-form feasibility.

Decides whether {x >= 0 : A x = b} is nonempty by minimizing the sum of
artificial variables with Bland's smallest-index rule (finite, no
cycling).  Every entry is a `fractions.Fraction`; no floating-point
presolve touches the verdict.

On success the basic feasible solution is returned; on failure the dual
multipliers of the phase-1 optimum yield a Farkas vector y with
y.A >= 0 componentwise and y.b < 0, an independently checkable
certificate of emptiness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["EqualityFeasibility", "solve_equality_feasibility"]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class EqualityFeasibility:
    feasible: bool
    solution: tuple[Fraction, ...] | None
    farkas: tuple[Fraction, ...] | None
    pivots: int


def solve_equality_feasibility(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]
) -> EqualityFeasibility:
    """Feasibility of {x >= 0 : rows . x = rhs}, exactly.

    The Farkas vector is expressed against the rows as given (before the
    internal sign normalization).
    """
    m = len(rows)
    if m != len(rhs):
        raise ValueError("row/rhs length mismatch")
    n = len(rows[0]) if m else 0
    for row in rows:
        if len(row) != n:
            raise ValueError("ragged constraint matrix")

    # Normalize to b >= 0, remembering the sign applied to each row.
    signs = [(-1 if b < 0 else 1) for b in rhs]
    tab = [
        [s * v for v in row] + [_ONE if i == j else _ZERO for j in range(m)] + [s * b]
        for i, (row, b, s) in enumerate(zip(rows, rhs, signs))
    ]
    width = n + m + 1

    # Reduced-cost row for min(sum of artificials): z_j - c_j bookkeeping
    # collapses to cost[j] = -sum_i tab[i][j] for structural columns.
    cost = [_ZERO] * width
    for j in range(width):
        acc = _ZERO
        for i in range(m):
            acc += tab[i][j]
        cost[j] = -acc
    for j in range(n, n + m):
        cost[j] += _ONE  # artificial columns carry cost 1

    basis = list(range(n, n + m))
    pivots = 0

    while True:
        entering = -1
        for j in range(n + m):
            if cost[j] < 0:
                entering = j
                break
        if entering < 0:
            break

        leaving = -1
        best_ratio: Fraction | None = None
        for i in range(m):
            coeff = tab[i][entering]
            if coeff > 0:
                ratio = tab[i][-1] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            # Phase-1 objective is bounded below by 0; this cannot happen.
            raise AssertionError("unbounded phase-1 objective")

        pivot = tab[leaving][entering]
        prow = tab[leaving]
        if pivot != 1:
            inv = 1 / pivot
            for j in range(width):
                prow[j] *= inv
        for i in range(m):
            if i != leaving:
                factor = tab[i][entering]
                if factor != 0:
                    row = tab[i]
                    for j in range(width):
                        row[j] -= factor * prow[j]
        factor = cost[entering]
        if factor != 0:
            for j in range(width):
                cost[j] -= factor * prow[j]
        basis[leaving] = entering
        pivots += 1

    objective = _ZERO
    for i in range(m):
        if basis[i] >= n:
            objective += tab[i][-1]

    if objective == 0:
        x = [_ZERO] * n
        for i in range(m):
            if basis[i] < n:
                x[basis[i]] = tab[i][-1]
        return EqualityFeasibility(True, tuple(x), None, pivots)

    # Dual multipliers: the reduced cost of artificial i is 1 - y_i, so
    # y_i = 1 - cost[n+i].  Then y.(sign-normalized A) <= 0 on structural
    # columns and y.(normalized b) = objective > 0; take u = -y and undo
    # the sign normalization per row.
    farkas = tuple(-(_ONE - cost[n + i]) * signs[i] for i in range(m))
    return EqualityFeasibility(False, None, farkas, pivots)
