import random
from fractions import Fraction

from jointfeas.geometry import cone_membership, dual_rays, nullspace

F = Fraction


def vec(*xs):
    return tuple(F(x) for x in xs)


def test_nullspace_basic():
    basis = nullspace([vec(1, 1, 0)])
    assert len(basis) == 2
    for b in basis:
        assert b[0] + b[1] == 0 or b[2] != 0


def test_membership_in_square_cone():
    # generators of the homogenized unit square: (1, corner)
    corners = [vec(1, x, y) for x in (0, 1) for y in (0, 1)]
    inside = vec(1, F(1, 3), F(2, 3))
    res = cone_membership(corners, inside)
    assert res.member
    total = [F(0)] * 3
    for idx, w in res.combination.items():
        assert w >= 0
        total = [t + w * g for t, g in zip(total, corners[idx])]
    assert tuple(total) == inside

    outside = vec(1, 2, F(1, 2))
    res = cone_membership(corners, outside)
    assert not res.member
    sep = res.separator
    for g in corners:
        assert sum(a * b for a, b in zip(sep, g)) >= 0
    assert sum(a * b for a, b in zip(sep, outside)) < 0


def test_membership_boundary_point():
    corners = [vec(1, 0), vec(1, 1)]
    res = cone_membership(corners, vec(1, 1))  # a vertex itself
    assert res.member
    res = cone_membership(corners, vec(1, F(1, 2)))
    assert res.member
    res = cone_membership(corners, vec(1, F(3, 2)))
    assert not res.member


def test_membership_off_span():
    gens = [vec(1, 1, 0), vec(1, -1, 0)]
    res = cone_membership(gens, vec(1, 0, 1))  # last coordinate unreachable
    assert not res.member
    sep = res.separator
    assert all(sum(a * b for a, b in zip(sep, g)) == 0 for g in gens)


def test_dual_rays_of_orthant():
    gens = [vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1)]
    lineality, rays = dual_rays(gens)
    assert not lineality
    assert sorted(rays) == sorted(gens)


def test_randomized_membership_matches_direct_check(rng=None):
    rng = rng or random.Random(7)
    for _ in range(40):
        dim = rng.randint(2, 4)
        points = [
            vec(1, *[F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(dim - 1)])
            for _ in range(rng.randint(2, 7))
        ]
        # random convex combination is always a member
        weights = [rng.randint(0, 4) for _ in points]
        if sum(weights) == 0:
            weights[0] = 1
        s = sum(weights)
        target = tuple(
            sum(F(w, s) * p[k] for w, p in zip(weights, points)) for k in range(dim)
        )
        res = cone_membership(points, target)
        assert res.member
        recombined = [F(0)] * dim
        for idx, w in res.combination.items():
            recombined = [t + w * g for t, g in zip(recombined, points[idx])]
        assert tuple(recombined) == target
