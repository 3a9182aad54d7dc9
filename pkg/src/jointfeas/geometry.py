"""Exact polyhedral cone geometry: double description and membership.

This is the second, simplex-independent decision path for moment
feasibility.  A moment problem is feasible exactly when the homogenized
target vector t~ = (1, targets) lies in the cone generated by the
homogenized atom moment columns g_i = (1, monomial values at atom i).

Membership is decided by enumerating the generators' dual description
(the extreme rays of {u : u.g_i >= 0 for all i}) with the classic
incremental double-description method using the combinatorial adjacency
test, all in exact rational arithmetic.  A violated dual ray is itself
a Farkas-style separation certificate; when the target is a member, an
explicit conic combination is recovered by descending through faces.

Scale expectations are desk-sized: dimension <= ~10, at most a few
hundred generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

__all__ = ["ConeMembership", "cone_membership", "dual_rays", "nullspace"]

Vec = tuple[Fraction, ...]

_ZERO = Fraction(0)


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    acc = _ZERO
    for a, b in zip(u, v):
        if a and b:
            acc += a * b
    return acc


def _primitive(v: Sequence[Fraction]) -> Vec:
    """Scale a nonzero rational vector to coprime integers (canonical form)."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(_ZERO for _ in v)
    return tuple(Fraction(x, g) for x in ints)


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    mat = [row[:] for row in rows]
    pivots: list[int] = []
    r = 0
    cols = len(mat[0]) if mat else 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]]) -> list[Vec]:
    """Basis of {x : rows . x = 0}, exact."""
    if not rows:
        return []
    cols = len(rows[0])
    mat, pivots = _rref([list(map(Fraction, r)) for r in rows])
    free = [c for c in range(cols) if c not in pivots]
    basis: list[Vec] = []
    for fc in free:
        vec = [_ZERO] * cols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(_primitive(vec))
    return basis


def _independent_rows(rows: list[Vec]) -> list[int]:
    """Indices of a maximal linearly independent subset, greedily from the front."""
    chosen: list[int] = []
    echelon: list[list[Fraction]] = []
    for idx, row in enumerate(rows):
        work = list(row)
        for e in echelon:
            lead = next((c for c in range(len(e)) if e[c] != 0), None)
            if lead is not None and work[lead] != 0:
                f = work[lead] / e[lead]
                work = [a - f * b for a, b in zip(work, e)]
        if any(x != 0 for x in work):
            echelon.append(work)
            chosen.append(idx)
    return chosen


def _solve_square(rows: list[Vec], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a nonsingular square rational system by Gaussian elimination."""
    n = len(rows)
    aug = [list(rows[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [aug[i][n] for i in range(n)]


def _extreme_rays_pointed(halfspaces: list[Vec]) -> list[Vec]:
    """Extreme rays of {u : a.u >= 0 for a in halfspaces}.

    Requires the halfspace normals to span the whole space, which makes
    the cone pointed.  Incremental double description: seed a simplicial
    cone from independent normals, insert the rest, keep only rays built
    from adjacent pairs (combinatorial adjacency test).
    """
    dim = len(halfspaces[0])
    normals = []
    seen: set[Vec] = set()
    for h in halfspaces:
        p = _primitive(h)
        if any(x != 0 for x in p) and p not in seen:
            seen.add(p)
            normals.append(p)

    base = _independent_rows(normals)
    if len(base) != dim:
        raise ValueError("halfspace normals do not span; cone is not pointed")

    basis_rows = [normals[i] for i in base]
    unit = [
        [Fraction(1) if i == j else _ZERO for i in range(dim)] for j in range(dim)
    ]
    rays: list[Vec] = []
    tight: dict[Vec, frozenset[int]] = {}
    for j in range(dim):
        ray = _primitive(_solve_square(basis_rows, unit[j]))
        rays.append(ray)
        tight[ray] = frozenset(base[i] for i in range(dim) if i != j)

    processed = set(base)
    for k, normal in enumerate(normals):
        if k in processed:
            continue
        vals = {r: _dot(normal, r) for r in rays}
        plus = [r for r in rays if vals[r] > 0]
        zero = [r for r in rays if vals[r] == 0]
        minus = [r for r in rays if vals[r] < 0]
        new_rays = plus + zero
        new_tight: dict[Vec, frozenset[int]] = {}
        for r in plus:
            new_tight[r] = tight[r]
        for r in zero:
            new_tight[r] = tight[r] | {k}
        for p in plus:
            for nray in minus:
                common = tight[p] & tight[nray]
                adjacent = True
                for other in rays:
                    if other is p or other is nray:
                        continue
                    if common <= tight[other]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                combo = tuple(
                    vals[p] * nc - vals[nray] * pc for pc, nc in zip(p, nray)
                )
                w = _primitive(combo)
                if w not in new_tight:
                    new_tight[w] = (common | {k})
                    new_rays.append(w)
        rays = new_rays
        tight = new_tight
        processed.add(k)
    return rays


def dual_rays(generators: list[Vec]) -> tuple[list[Vec], list[Vec]]:
    """Describe the dual cone D = {u : u.g >= 0 for every generator g}.

    Returns (lineality_basis, rays): D equals span(lineality_basis)
    plus the cone of the rays.  The rays are computed in coordinates of
    the generators' span so the double description always runs on a
    pointed cone.
    """
    lineality = nullspace(generators)
    span_idx = _independent_rows([_primitive(g) for g in generators])
    basis = [_primitive(generators[i]) for i in span_idx]  # columns of the lift map
    if not basis:
        return lineality, []
    reduced = [tuple(_dot(b, g) for b in basis) for g in generators]
    rays_z = _extreme_rays_pointed(reduced)
    rays = []
    for z in rays_z:
        ambient = [_ZERO] * len(generators[0])
        for coeff, b in zip(z, basis):
            if coeff:
                ambient = [a + coeff * x for a, x in zip(ambient, b)]
        rays.append(_primitive(ambient))
    return lineality, rays


@dataclass(frozen=True)
class ConeMembership:
    member: bool
    combination: dict[int, Fraction] | None  # generator index -> weight >= 0
    separator: Vec | None  # u with u.g_i >= 0 for all i and u.target < 0


def cone_membership(generators: list[Vec], target: Vec) -> ConeMembership:
    """Is target a nonnegative combination of the generators?  Exact."""
    lineality, rays = dual_rays(generators)
    for line in lineality:
        val = _dot(line, target)
        if val != 0:
            sep = line if val < 0 else tuple(-x for x in line)
            return ConeMembership(False, None, sep)
    for ray in rays:
        if _dot(ray, target) < 0:
            return ConeMembership(False, None, ray)
    combo = _express_in_cone(list(target), generators, rays)
    return ConeMembership(True, combo, None)


def _express_in_cone(
    target: list[Fraction], generators: list[Vec], rays: list[Vec]
) -> dict[int, Fraction]:
    """Conic combination of the generators equal to target.

    Face descent: while the target sits on a dual ray's hyperplane,
    restrict to that face; otherwise subtract the largest feasible
    multiple of one generator, which lands the remainder on a face.
    Depth is bounded by the dimension, so this terminates.
    """
    combo: dict[int, Fraction] = {}
    active = list(range(len(generators)))
    current = list(target)
    current_rays = rays

    while any(x != 0 for x in current):
        binding = next((r for r in current_rays if _dot(r, current) == 0), None)
        if binding is not None:
            active = [i for i in active if _dot(binding, generators[i]) == 0]
            if not active:
                raise AssertionError("face descent lost all generators")
            _, current_rays = dual_rays([generators[i] for i in active])
            # Rays of the face cone; hyperplanes through the face interior
            # vanish on every remaining generator and are dropped.
            current_rays = [
                r
                for r in current_rays
                if any(_dot(r, generators[i]) != 0 for i in active)
            ]
            continue

        g_idx = active[0]
        g = generators[g_idx]
        theta: Fraction | None = None
        for r in current_rays:
            rg = _dot(r, g)
            if rg > 0:
                cand = _dot(r, current) / rg
                if theta is None or cand < theta:
                    theta = cand
        if theta is None:
            # No dual ray sees g: only possible when the face cone is a
            # single ray and current is parallel to it.
            theta = next(
                current[j] / g[j] for j in range(len(g)) if g[j] != 0
            )
        if theta <= 0:
            raise AssertionError("face descent produced a nonpositive step")
        combo[g_idx] = combo.get(g_idx, _ZERO) + theta
        current = [c - theta * x for c, x in zip(current, g)]

    return combo
