import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aniso_cheeger.errors import (
    BadParameter,
    DegenerateInput,
    NegativeRho,
    NonFinite,
    OriginNotInterior,
    ZeroDirection,
)
from aniso_cheeger.planar_convex import (
    Anisotropy,
    ConvexPolygon,
    HalfPlane,
    anisotropic_perimeter,
    area,
    circumscribed_polygon,
    disc,
    erode,
    hausdorff_distance,
    intersect_halfplanes,
    make_polygon,
    minkowski_sum,
    polar_body,
    regular_polygon,
    support_value,
    support_values,
)

from conftest import random_anisotropy, random_convex


# --- independent oracles -------------------------------------------------

def brute_hull_vertices(pts):
    """Points p_i such that some (p_i, p_j) has every other point strictly left."""
    n = len(pts)
    verts = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = pts[j] - pts[i]
            rel = np.delete(pts, [i, j], axis=0) - pts[i]
            if np.all(d[0] * rel[:, 1] - d[1] * rel[:, 0] > 0):
                verts.add(i)
                verts.add(j)
    return {tuple(np.round(pts[k], 12)) for k in verts}


def ray_extent(P, direction):
    """Distance from the origin to the boundary of P along ``direction``."""
    u = np.asarray(direction, float) / np.linalg.norm(direction)
    a = P.vertices
    b = np.roll(a, -1, axis=0)
    best = math.inf
    for p, q in zip(a, b):
        e = q - p
        m = np.array([[u[0], -e[0]], [u[1], -e[1]]])
        if abs(np.linalg.det(m)) < 1e-15:
            continue
        t, s = np.linalg.solve(m, p)
        if t > 0 and -1e-12 <= s <= 1 + 1e-12:
            best = min(best, t)
    return best


def sampled_boundary(P, per_edge=2000):
    a = P.vertices
    b = np.roll(a, -1, axis=0)
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)[:, None]
    return np.vstack([p + t * (q - p) for p, q in zip(a, b)])


def dense_hausdorff(P, Q, per_edge=2000):
    """Symmetric max-min over sampled boundary points (boundary vs boundary is
    exact for convex sets only when one contains no interior of the other, so
    the oracle uses region distances via membership)."""
    def one_side(A, B):
        pa = sampled_boundary(A, per_edge)
        inside = B.contains(pa)
        pb = sampled_boundary(B, per_edge)
        best = 0.0
        for chunk in np.array_split(pa[~inside], max(1, len(pa) // 500)):
            if len(chunk) == 0:
                continue
            d = np.sqrt(((chunk[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)).min(axis=1)
            best = max(best, float(d.max()))
        return best

    return max(one_side(P, Q), one_side(Q, P))


def same_cycle(P, expected, tol=1e-12):
    v = P.vertices
    e = np.asarray(expected, float)
    assert len(v) == len(e)
    k = int(np.argmin(np.hypot(*(v - e[0]).T)))
    np.testing.assert_allclose(np.roll(v, -k, axis=0), e, atol=tol)


# --- construction ----------------------------------------------------------

def test_make_polygon_square_is_ccw():
    P = make_polygon([[1, 1], [-1, 1], [-1, -1], [1, -1]])
    assert len(P) == 4
    assert P.area == pytest.approx(4.0)
    assert {tuple(v) for v in P.vertices} == {(1, 1), (-1, 1), (-1, -1), (1, -1)}


def test_make_polygon_rejects_collinear():
    with pytest.raises(DegenerateInput):
        make_polygon([[0, 0], [1, 0], [2, 0]])


def test_make_polygon_rejects_nonfinite():
    with pytest.raises(NonFinite):
        make_polygon([[0, 0], [1, 0], [math.nan, 1]])


def test_make_polygon_merges_duplicates_and_collinear():
    P = make_polygon([[0, 0], [0, 0], [1, 0], [2, 0], [2, 2], [0, 2], [1, 2]])
    assert len(P) == 4


@pytest.mark.parametrize("seed", range(5))
def test_hull_matches_pairwise_orientation_oracle(seed):
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(size=100))
    t = rng.uniform(0, 2 * math.pi, 100)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    P = make_polygon(pts)
    assert {tuple(np.round(v, 12)) for v in P.vertices} == brute_hull_vertices(pts)


def test_constructor_rejects_clockwise_and_reflex():
    with pytest.raises(DegenerateInput):
        ConvexPolygon([[1, 1], [1, -1], [-1, -1], [-1, 1]])
    with pytest.raises(DegenerateInput):
        ConvexPolygon([[0, 0], [2, 0], [1, 0.2], [2, 2], [0, 2]])


def test_vertices_are_read_only(square):
    with pytest.raises(ValueError):
        square.vertices[0, 0] = 5.0


def test_regular_polygon_square():
    P = regular_polygon(4, math.sqrt(2), math.pi / 4)
    same_cycle(P, [[1, 1], [-1, 1], [-1, -1], [1, -1]], tol=1e-15)


def test_regular_polygon_bad_parameters():
    with pytest.raises(BadParameter):
        regular_polygon(2, 1.0)
    with pytest.raises(BadParameter):
        regular_polygon(5, -1.0)
    with pytest.raises(BadParameter):
        circumscribed_polygon(5)


@pytest.mark.parametrize("n", [4, 6, 8, 12])
def test_circumscribed_polygon_has_unit_apothem(n):
    P = circumscribed_polygon(n)
    np.testing.assert_allclose(P.offsets, 1.0, atol=1e-14)
    # two sides parallel to the y-axis
    assert np.min(np.hypot(P.normals[:, 0] - 1, P.normals[:, 1])) < 1e-14
    assert P.area == pytest.approx(n * math.tan(math.pi / n), rel=1e-14)


def test_area_examples(square):
    assert area(square) == 4.0
    assert area(circumscribed_polygon(6)) == pytest.approx(6 * math.tan(math.pi / 6), rel=1e-14)
    assert area(disc(4096)) == pytest.approx(math.pi, abs=1e-5)
    assert area(disc(4096)) == pytest.approx(2048 * math.sin(2 * math.pi / 4096), rel=1e-13)


# --- support function ------------------------------------------------------

def test_support_value_square(square_aniso):
    assert support_value(square_aniso, (1, 0)) == 1.0
    assert support_value(square_aniso, (3, 4)) == 7.0


def test_support_value_zero_direction(square_aniso):
    with pytest.raises(ZeroDirection):
        support_value(square_aniso, (0, 0))


@pytest.mark.parametrize("n", [4, 6, 10])
def test_support_of_circumscribed_polygon_angle_formula(n, pstar):
    K = pstar(n)
    for theta in np.linspace(0, math.pi / n, 25):
        expected = math.cos(math.pi / n - theta) / math.cos(math.pi / n)
        assert support_value(K, (math.cos(theta), math.sin(theta))) == pytest.approx(expected, abs=1e-12)


def test_batched_support_matches_brute_force():
    rng = np.random.default_rng(3)
    K = random_anisotropy(rng, pairs=3)
    d = rng.normal(size=(1000, 2))
    brute = (d @ K.body.vertices.T).max(axis=1)
    np.testing.assert_allclose(K.support(d), brute, rtol=0, atol=1e-13)
    big = disc(512)
    d = rng.normal(size=(3000, 2))
    np.testing.assert_allclose(support_values(big.vertices, d), (d @ big.vertices.T).max(axis=1), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), t=st.floats(1e-3, 1e3), theta=st.floats(0, 2 * math.pi))
def test_support_homogeneous_and_even(seed, t, theta):
    K = random_anisotropy(np.random.default_rng(seed))
    d = np.array([math.cos(theta), math.sin(theta)])
    base = support_value(K, d)
    assert support_value(K, t * d) == pytest.approx(t * base, rel=1e-12)
    assert support_value(K, -d) == pytest.approx(base, rel=1e-12)


# --- polarity --------------------------------------------------------------

def test_polar_of_square_is_diamond(square):
    Q = polar_body(square)
    assert {tuple(np.round(v, 15)) for v in Q.vertices} == {(1, 0), (0, 1), (-1, 0), (0, -1)}


@pytest.mark.parametrize("n", [4, 6, 8])
def test_polar_of_circumscribed_polygon(n):
    P = circumscribed_polygon(n)
    Q = polar_body(P)
    t = math.pi / n
    assert Q.area == pytest.approx(n * math.sin(t) * math.cos(t), rel=1e-13)
    rotated = regular_polygon(n, 1.0, 0.0)  # circumradius 1, vertex on the x-axis
    assert hausdorff_distance(Q, rotated) < 1e-13


def test_polar_requires_interior_origin():
    P = make_polygon([[1, 1], [3, 1], [3, 3], [1, 3]])
    with pytest.raises(OriginNotInterior):
        polar_body(P)


def test_polar_matches_radial_sampling_oracle():
    rng = np.random.default_rng(11)
    K = random_anisotropy(rng, pairs=4)
    # the corner cut of the sampled hull shrinks linearly with the angular step
    theta = np.linspace(0.0, 2 * math.pi, 1 << 23, endpoint=False)
    u = np.column_stack([np.cos(theta), np.sin(theta)])
    h = np.concatenate([(c @ K.body.vertices.T).max(axis=1) for c in np.array_split(u, 16)])
    sampled = make_polygon(u / h[:, None])
    assert hausdorff_distance(polar_body(K.body), sampled) < 1e-6


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_polar_involution(seed):
    K = random_anisotropy(np.random.default_rng(seed))
    back = polar_body(polar_body(K.body))
    assert hausdorff_distance(back, K.body) <= 1e-9 * K.body.diameter


@pytest.mark.parametrize("seed", range(3))
def test_support_times_polar_extent_is_one(seed):
    rng = np.random.default_rng(seed)
    K = random_anisotropy(rng)
    for theta in rng.uniform(0, 2 * math.pi, 40):
        u = (math.cos(theta), math.sin(theta))
        assert support_value(K, u) * ray_extent(K.polar, u) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("t", [0.1, 3.0, 25.0])
def test_polar_and_area_scaling(t):
    K = random_anisotropy(np.random.default_rng(5)).body
    assert hausdorff_distance(polar_body(K.scaled(t)), polar_body(K).scaled(1 / t)) < 1e-12 / t
    assert K.scaled(t).area == pytest.approx(t * t * K.area, rel=1e-13)


# --- anisotropy ------------------------------------------------------------

def test_anisotropy_fields(square_aniso):
    assert square_aniso.area_body == 4.0
    assert square_aniso.area_polar == pytest.approx(2.0)
    assert not square_aniso.symmetrized


def test_anisotropy_symmetrizes_with_warning():
    tri = make_polygon([[1, 0], [-0.5, 1], [-0.5, -1]])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        K = Anisotropy.from_polygon(tri)
    assert K.symmetrized
    assert caught
    assert len(K.body) == 6
    v = K.body.vertices
    np.testing.assert_allclose(v + np.roll(v, -3, axis=0), 0.0, atol=1e-15)


def test_anisotropy_direct_construction_checks_symmetry():
    tri = make_polygon([[1, 0], [-0.5, 1], [-0.5, -1]])
    with pytest.raises(DegenerateInput):
        Anisotropy(tri, polar_body(tri), tri.area, 1.0)


# --- Minkowski sum ---------------------------------------------------------

def test_minkowski_square_plus_square(square):
    S = minkowski_sum(square, square)
    assert hausdorff_distance(S, square.scaled(2)) == 0.0
    assert len(S) == 4


def test_minkowski_square_plus_diamond_is_octagon(square):
    diamond = make_polygon([[1, 0], [0, 1], [-1, 0], [0, -1]])
    S = minkowski_sum(square, diamond)
    oracle = make_polygon((square.vertices[:, None, :] + diamond.vertices[None, :, :]).reshape(-1, 2))
    assert len(S) == 8
    assert hausdorff_distance(S, oracle) < 1e-14


@pytest.mark.parametrize("seed", range(10))
def test_minkowski_matches_pairwise_sum_hull(seed):
    rng = np.random.default_rng(seed)
    P = random_convex(rng, center=rng.normal(size=2))
    Q = random_convex(rng, center=rng.normal(size=2))
    S = minkowski_sum(P, Q)
    oracle = make_polygon((P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, 2))
    assert hausdorff_distance(S, oracle) < 1e-12
    assert len(S) == len(oracle)
    assert S.area >= P.area + Q.area


# --- half-plane intersection and erosion -----------------------------------

def test_halfplane_intersection_square():
    planes = [HalfPlane((1, 0), 1), HalfPlane((0, 1), 1), HalfPlane((-1, 0), 1),
              HalfPlane((0, -1), 1), HalfPlane((1, 0), 3)]
    P = intersect_halfplanes(planes)
    assert P.area == pytest.approx(4.0)


def test_halfplane_intersection_empty_and_unbounded():
    assert intersect_halfplanes([HalfPlane((1, 0), -1), HalfPlane((-1, 0), -1),
                                 HalfPlane((0, 1), 1), HalfPlane((0, -1), 1)]) is None
    with pytest.raises(DegenerateInput):
        intersect_halfplanes([HalfPlane((1, 0), 1), HalfPlane((0, 1), 1)])


def test_halfplane_unit_normal_required():
    with pytest.raises(BadParameter):
        HalfPlane((2, 0), 1)
    assert HalfPlane.from_normal((2, 0), 4).offset == 2.0


def test_erode_square_by_square(square, square_aniso):
    E = erode(square, square_aniso, 0.25)
    assert hausdorff_distance(E, square.scaled(0.75)) < 1e-15


def test_erode_zero_is_identity(square, square_aniso):
    assert erode(square, square_aniso, 0.0) is square


def test_erode_unit_square_by_disc(unit_square, disc_aniso):
    rho = 1 / (2 + math.sqrt(math.pi))
    E = erode(unit_square, disc_aniso, rho)
    assert E.area == pytest.approx((1 - 2 * rho) ** 2, abs=1e-12)
    assert E.area == pytest.approx(math.pi * rho**2, abs=1e-4)


def test_erode_past_inradius_is_empty(square, square_aniso):
    assert erode(square, square_aniso, 1.0) is None
    assert erode(square, square_aniso, 1.5) is None


def test_erode_negative_rho(square, square_aniso):
    with pytest.raises(NegativeRho):
        erode(square, square_aniso, -0.1)


@pytest.mark.parametrize("factor", [0.15, 0.4, 1.0])
@pytest.mark.parametrize("seed", range(6))
def test_erosion_matches_membership_oracle(seed, factor):
    """x is in Omega - rho K iff every x + rho v (v a vertex of K) is in Omega."""
    rng = np.random.default_rng(seed)
    omega = random_convex(rng, count=9)
    K = random_anisotropy(rng)
    rho = factor * omega.width / K.body.diameter
    E = erode(omega, K, rho)
    pts = omega.vertices.min(axis=0) + rng.uniform(size=(3000, 2)) * np.ptp(omega.vertices, axis=0)
    shifted = pts[:, None, :] + rho * K.body.vertices[None, :, :]
    oracle = omega.contains(shifted.reshape(-1, 2), tol=0.0).reshape(len(pts), -1).all(axis=1)
    if E is None:
        assert not oracle.any()
        return
    margin = 1e-9
    inner = E.contains(pts, tol=-margin)
    outer = E.contains(pts, tol=margin)
    assert np.all(oracle[inner])
    assert not np.any(oracle & ~outer)
    if factor == 0.15:
        assert inner.any()


@pytest.mark.parametrize("seed", range(5))
def test_erosion_area_monotone_and_inclusion(seed):
    rng = np.random.default_rng(100 + seed)
    omega = random_convex(rng, count=10)
    K = random_anisotropy(rng)
    rhos = np.linspace(0, omega.width / K.body.width, 40)
    areas = []
    prev = None
    for r in rhos:
        E = erode(omega, K, r)
        areas.append(0.0 if E is None else E.area)
        if E is not None:
            # (Omega - rho K) + rho K is inside Omega
            if r > 0:
                back = minkowski_sum(E, K.body.scaled(r))
                assert omega.contains(back.vertices, tol=1e-9 * omega.scale).all()
            if prev is not None:
                assert prev.contains(E.vertices, tol=1e-12).all()
            prev = E
    assert np.all(np.diff(areas) <= 1e-12)
    assert areas[-1] == 0.0


# --- anisotropic perimeter -------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda rng: Anisotropy.from_polygon(make_polygon([[1, 1], [-1, 1], [-1, -1], [1, -1]])),
    lambda rng: Anisotropy.from_polygon(regular_polygon(6, 1.3, 0.2)),
    lambda rng: random_anisotropy(rng, pairs=4),
])
def test_wulff_shape_ratio_is_two(make):
    K = make(np.random.default_rng(9))
    assert anisotropic_perimeter(K.body, K) / K.area_body == pytest.approx(2.0, rel=1e-12)


def test_isotropic_circumference(disc4096, disc_aniso):
    assert anisotropic_perimeter(disc4096, disc_aniso) == pytest.approx(2 * math.pi, abs=1e-4)


def test_perimeter_of_disc_cheeger_set_n4(pstar):
    from aniso_cheeger.disc_regular_polygon import competitor_perimeter, solve_half_side

    n = 4
    x = solve_half_side(n)
    t = math.pi / n
    # build E_x: the disc (4096 samples) cut by the n straight sides at distance sqrt(1-x^2)
    theta = np.linspace(0, 2 * math.pi, 4096, endpoint=False)
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    normals_angles = 2 * t * np.arange(n)
    d = math.sqrt(1 - x * x)
    keep = np.ones(len(circle), bool)
    corners = []
    for a in normals_angles:
        nrm = np.array([math.cos(a), math.sin(a)])
        keep &= circle @ nrm <= d
        tangent = np.array([-nrm[1], nrm[0]])
        corners += [d * nrm + x * tangent, d * nrm - x * tangent]
    E = make_polygon(np.vstack([circle[keep], corners]))
    assert anisotropic_perimeter(E, pstar(n)) == pytest.approx(competitor_perimeter(n, x), abs=1e-3)


@pytest.mark.parametrize("seed", range(5))
def test_isoperimetric_equality_for_translates(seed):
    rng = np.random.default_rng(seed)
    K = random_anisotropy(rng)
    E = K.body.scaled(rng.uniform(0.2, 5)).translated(rng.normal(size=2))
    per = anisotropic_perimeter(E, K)
    assert per**2 == pytest.approx(4 * K.area_body * E.area, rel=1e-6)


# --- Hausdorff -------------------------------------------------------------

def test_hausdorff_examples(square):
    assert hausdorff_distance(square, square) == 0.0
    assert hausdorff_distance(square, square.scaled(2)) == pytest.approx(math.sqrt(2), rel=1e-14)
    assert hausdorff_distance(square, square.translated((0.3, 0))) == pytest.approx(0.3, rel=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_hausdorff_matches_dense_sampling(seed):
    rng = np.random.default_rng(seed)
    P = random_convex(rng, count=6)
    Q = random_convex(rng, count=6, center=rng.normal(size=2))
    exact = hausdorff_distance(P, Q)
    assert exact == pytest.approx(hausdorff_distance(Q, P))
    assert dense_hausdorff(P, Q, 400) == pytest.approx(exact, rel=1e-3, abs=1e-3)


def test_support_lipschitz_under_hausdorff_perturbation():
    """Support values move by at most the Hausdorff distance of the bodies."""
    rng = np.random.default_rng(21)
    K = random_anisotropy(rng, pairs=4)
    for eps in (1e-1, 1e-2, 1e-3):
        pts = K.body.vertices + eps * rng.uniform(-1, 1, K.body.vertices.shape) / math.sqrt(2)
        K2 = Anisotropy.from_points(pts, warn=False)
        dist = hausdorff_distance(K.body, K2.body)
        d = rng.normal(size=(200, 2))
        d /= np.linalg.norm(d, axis=1)[:, None]
        assert np.max(np.abs(K.support(d) - K2.support(d))) <= dist + 1e-12
