"""Convex polygon primitives: hulls, support functions, polarity, Minkowski
sums, erosion by a scaled anisotropy and anisotropic perimeter.

Polygons are stored as ``(n, 2)`` float arrays of counterclockwise vertices.
Smooth bodies such as the disc are represented by fine regular polygons.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    BadParameter,
    DegenerateInput,
    NegativeRho,
    NonFinite,
    OriginNotInterior,
    ZeroDirection,
)

TAU_GEOM = 1e-9
DISC_RESOLUTION = 4096

Point2 = Tuple[float, float]
PointsLike = Union[np.ndarray, Sequence[Sequence[float]]]

# rows per block when forming dense point/edge products
_CHUNK = 512


def _as_points(points: PointsLike) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise BadParameter(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("points contain NaN or infinite coordinates")
    return arr


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _turns(v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cross product at each vertex plus lengths of the incoming/outgoing edges."""
    e_in = v - np.roll(v, 1, axis=0)
    e_out = np.roll(v, -1, axis=0) - v
    cross = e_in[:, 0] * e_out[:, 1] - e_in[:, 1] * e_out[:, 0]
    return cross, np.hypot(e_in[:, 0], e_in[:, 1]), np.hypot(e_out[:, 0], e_out[:, 1])


def _diameter_bound(v: np.ndarray) -> float:
    span = v.max(axis=0) - v.min(axis=0)
    return float(np.hypot(span[0], span[1]))


def _simplify(v: np.ndarray, tol: float = TAU_GEOM) -> np.ndarray:
    """Drop near-duplicate and near-collinear vertices of a convex CCW cycle.

    Collinearity is judged by the sine of the turning angle, so the test does
    not depend on the scale of the data.
    """
    scale = _diameter_bound(v)
    while len(v) >= 3:
        cross, l_in, l_out = _turns(v)
        bad = (l_in <= tol * scale) | (cross <= tol * l_in * l_out)
        if not bad.any():
            break
        # never remove two neighbours in one sweep
        idx = np.flatnonzero(bad)
        keep_mask = np.ones(len(v), dtype=bool)
        last = -2
        for i in idx:
            if i != last + 1:
                keep_mask[i] = False
                last = i
        if not keep_mask[0] and not keep_mask[-1] and len(v) > 1:
            keep_mask[-1] = True
        v = v[keep_mask]
    return v


@dataclass(frozen=True)
class HalfPlane:
    """The closed set ``{x : x . normal <= offset}`` with a unit outward normal."""

    normal: Point2
    offset: float

    def __post_init__(self):
        nx, ny = float(self.normal[0]), float(self.normal[1])
        norm = math.hypot(nx, ny)
        if not (math.isfinite(norm) and math.isfinite(self.offset)):
            raise NonFinite("half-plane has non-finite data")
        if abs(norm - 1.0) > TAU_GEOM:
            raise BadParameter(f"half-plane normal must be unit length, got |n| = {norm}")
        object.__setattr__(self, "normal", (nx, ny))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal: Point2, offset: float) -> "HalfPlane":
        """Build from a non-normalized normal, rescaling the offset to match."""
        norm = math.hypot(normal[0], normal[1])
        if norm == 0.0:
            raise ZeroDirection("half-plane normal is zero")
        return cls((normal[0] / norm, normal[1] / norm), offset / norm)

    def contains(self, point: Point2, tol: float = 0.0) -> bool:
        return point[0] * self.normal[0] + point[1] * self.normal[1] <= self.offset + tol


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Strictly convex polygon with counterclockwise vertices.

    The constructor validates but never repairs; use :func:`make_polygon` to
    hull arbitrary point sets.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = _as_points(self.vertices).copy()
        if len(v) < 3:
            raise DegenerateInput(f"a polygon needs at least 3 vertices, got {len(v)}")
        if _signed_area(v) <= 0.0:
            raise DegenerateInput("vertices are not in counterclockwise order")
        cross, l_in, l_out = _turns(v)
        if np.any(l_in <= TAU_GEOM * _diameter_bound(v)):
            raise DegenerateInput("consecutive vertices coincide")
        if np.any(cross <= TAU_GEOM * l_in * l_out):
            raise DegenerateInput("polygon is not strictly convex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"ConvexPolygon(n={len(self)}, area={self.area:.6g})"

    @cached_property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edges[:, 0], self.edges[:, 1])

    @cached_property
    def normals(self) -> np.ndarray:
        """Unit outward normals, one per edge (edge ``i`` runs from vertex ``i`` to ``i+1``)."""
        e = self.edges
        return np.column_stack([e[:, 1], -e[:, 0]]) / self.edge_lengths[:, None]

    @cached_property
    def offsets(self) -> np.ndarray:
        """Support numbers of the edge lines: ``normal_i . vertex_i``."""
        return np.einsum("ij,ij->i", self.normals, self.vertices)

    @cached_property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @cached_property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    @cached_property
    def scale(self) -> float:
        """Bounding-box diagonal; within a factor sqrt(2) of the diameter."""
        return _diameter_bound(self.vertices)

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        best = 0.0
        for start in range(0, len(v), _CHUNK):
            block = v[start:start + _CHUNK]
            d = block[:, None, :] - v[None, :, :]
            best = max(best, float(np.sqrt((d * d).sum(axis=2).max())))
        return best

    @cached_property
    def width(self) -> float:
        """Minimal width, attained in one of the edge normal directions."""
        hi = support_values(self.vertices, self.normals)
        lo = -support_values(self.vertices, -self.normals)
        return float((hi - lo).min())

    @cached_property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cr = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return ((v + w) * cr[:, None]).sum(axis=0) / (6.0 * self.area)

    def scaled(self, t: float) -> "ConvexPolygon":
        if not t > 0:
            raise BadParameter(f"scale factor must be positive, got {t}")
        return ConvexPolygon(self.vertices * t)

    def translated(self, shift: Point2) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(shift, dtype=float))

    def transformed(self, matrix) -> "ConvexPolygon":
        """Image under an invertible linear map (orientation restored if reversed)."""
        a = np.asarray(matrix, dtype=float)
        if abs(np.linalg.det(a)) <= TAU_GEOM:
            raise BadParameter("linear map is singular")
        return make_polygon(self.vertices @ a.T)

    def contains(self, points: PointsLike, tol: float = 0.0) -> np.ndarray:
        """Vectorized closed membership test; ``tol`` is an absolute slack."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(len(p), dtype=bool)
        for start in range(0, len(p), _CHUNK):
            block = p[start:start + _CHUNK]
            out[start:start + _CHUNK] = (
                (block @ self.normals.T - self.offsets[None, :]) <= tol
            ).all(axis=1)
        return out

    def halfplanes(self) -> list:
        return [HalfPlane(tuple(n), float(h)) for n, h in zip(self.normals, self.offsets)]

    def to_list(self) -> list:
        return [[float(x), float(y)] for x, y in self.vertices]


def make_polygon(points: PointsLike) -> ConvexPolygon:
    """Convex hull of ``points`` as a counterclockwise :class:`ConvexPolygon`."""
    p = _as_points(points)
    if len(p) < 3:
        raise DegenerateInput(f"need at least 3 points, got {len(p)}")
    try:
        hull = ConvexHull(p)
    except QhullError as exc:
        raise DegenerateInput("points are collinear or coincident") from exc
    v = _simplify(p[hull.vertices])
    if len(v) < 3 or _signed_area(v) <= TAU_GEOM * _diameter_bound(v) ** 2:
        raise DegenerateInput("convex hull has no interior")
    return ConvexPolygon(v)


def regular_polygon(n: int, circumradius: float = 1.0, phase: float = 0.0) -> ConvexPolygon:
    """Regular ``n``-gon with vertices at angles ``phase + 2 pi k / n``."""
    if int(n) != n or n < 3:
        raise BadParameter(f"n must be an integer >= 3, got {n}")
    if not circumradius > 0 or not math.isfinite(circumradius):
        raise BadParameter(f"circumradius must be positive, got {circumradius}")
    ang = phase + 2.0 * np.pi * np.arange(int(n)) / int(n)
    return ConvexPolygon(circumradius * np.column_stack([np.cos(ang), np.sin(ang)]))


def circumscribed_polygon(n: int) -> ConvexPolygon:
    """Regular ``n``-gon with apothem 1 and two sides parallel to the y-axis."""
    if int(n) != n or n < 4 or n % 2:
        raise BadParameter(f"n must be an even integer >= 4, got {n}")
    return regular_polygon(n, 1.0 / math.cos(math.pi / n), math.pi / n)


def disc(m: int = DISC_RESOLUTION, radius: float = 1.0) -> ConvexPolygon:
    """Inscribed regular ``m``-gon standing in for the disc of given radius."""
    return regular_polygon(m, radius, 0.0)


def area(P: ConvexPolygon) -> float:
    return P.area


def support_values(vertices: np.ndarray, directions: PointsLike) -> np.ndarray:
    """Support function of a convex CCW vertex cycle for many directions.

    Each direction is routed to its maximizing vertex by a binary search over
    the edge-normal angles; neighbours of that vertex are also tried so that
    ties on the boundaries of normal cones are resolved exactly.
    """
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    if n <= 16 or len(d) <= 16:
        return (d @ v.T).max(axis=1)
    e = np.roll(v, -1, axis=0) - v
    phi = np.arctan2(-e[:, 0] + 0.0, e[:, 1])
    two_pi = 2.0 * np.pi
    phi_u = phi[0] + np.mod(phi - phi[0], two_pi)
    phi_u[0] = phi[0]
    theta = np.arctan2(d[:, 1], d[:, 0])
    theta_u = phi[0] + np.mod(theta - phi[0], two_pi)
    idx = np.searchsorted(phi_u, theta_u, side="left")
    best = np.full(len(d), -np.inf)
    for off in (-1, 0, 1):
        cand = v[np.mod(idx + off, n)]
        best = np.maximum(best, np.einsum("ij,ij->i", cand, d))
    return best


def _check_direction(direction) -> np.ndarray:
    d = np.asarray(direction, dtype=float).reshape(2)
    if not np.all(np.isfinite(d)):
        raise NonFinite("direction is not finite")
    if d[0] == 0.0 and d[1] == 0.0:
        raise ZeroDirection("support function needs a nonzero direction")
    return d


def _is_centrally_symmetric(v: np.ndarray, tol: float) -> bool:
    if len(v) % 2:
        return False
    half = len(v) // 2
    return bool(np.all(np.hypot(*(v + np.roll(v, -half, axis=0)).T) <= tol))


def polar_body(K: ConvexPolygon) -> ConvexPolygon:
    """Polar set ``{x : x . y <= 1 for all y in K}``.

    Each edge of ``K`` with unit normal ``n`` and support number ``h`` gives
    the polar vertex ``n / h``.
    """
    h = K.offsets
    if np.any(h <= TAU_GEOM * K.scale):
        raise OriginNotInterior("the origin must lie in the interior of K")
    return ConvexPolygon(_simplify(K.normals / h[:, None]))


@dataclass(frozen=True, eq=False)
class Anisotropy:
    """Centrally symmetric body ``K`` bundled with its polar and areas.

    Build with :meth:`from_polygon` or :meth:`from_points`; those symmetrize
    the input (``V`` becomes the hull of ``V`` and ``-V``) and set
    ``symmetrized`` when that changed anything.
    """

    body: ConvexPolygon
    polar: ConvexPolygon
    area_body: float
    area_polar: float
    symmetrized: bool = False

    def __post_init__(self):
        v = self.body.vertices
        if not _is_centrally_symmetric(v, TAU_GEOM * self.body.scale):
            raise DegenerateInput("anisotropy body is not centrally symmetric")

    @classmethod
    def from_polygon(cls, body: ConvexPolygon, *, warn: bool = True) -> "Anisotropy":
        v = body.vertices
        changed = False
        if not _is_centrally_symmetric(v, TAU_GEOM * body.scale):
            body = make_polygon(np.vstack([v, -v]))
            changed = True
            if warn:
                warnings.warn(
                    "anisotropy was not centrally symmetric; replaced by hull(V, -V)",
                    stacklevel=2,
                )
        if len(body) % 2 == 0:
            # snap antipodal pairs so the pairing holds to rounding
            half = len(body) // 2
            w = body.vertices
            sym = 0.5 * (w - np.roll(w, -half, axis=0))
            if _is_centrally_symmetric(w, TAU_GEOM * body.scale):
                body = ConvexPolygon(sym)
        polar = polar_body(body)
        return cls(body, polar, body.area, polar.area, changed)

    @classmethod
    def from_points(cls, points: PointsLike, *, warn: bool = True) -> "Anisotropy":
        return cls.from_polygon(make_polygon(points), warn=warn)

    def support(self, directions: PointsLike) -> np.ndarray:
        """Vectorized support function of the body."""
        return support_values(self.body.vertices, directions)

    def scaled(self, t: float) -> "Anisotropy":
        body = self.body.scaled(t)
        polar = polar_body(body)
        return Anisotropy(body, polar, body.area, polar.area, self.symmetrized)

    def transformed(self, matrix) -> "Anisotropy":
        return Anisotropy.from_polygon(self.body.transformed(matrix), warn=False)

    @property
    def mahler(self) -> float:
        return self.area_body * self.area_polar


def _body_vertices(K) -> np.ndarray:
    return K.body.vertices if isinstance(K, Anisotropy) else K.vertices


def support_value(K: Union[Anisotropy, ConvexPolygon], direction) -> float:
    """``max_{v in K} v . direction`` (the polar norm of ``direction``)."""
    d = _check_direction(direction)
    return float((_body_vertices(K) @ d).max())


def minkowski_sum(P: ConvexPolygon, Q: ConvexPolygon) -> ConvexPolygon:
    """Minkowski sum by merging the two edge sequences in angular order."""
    parts = []
    start = np.zeros(2)
    for poly in (P, Q):
        v = poly.vertices
        i0 = int(np.lexsort((v[:, 0], v[:, 1]))[0])
        v = np.roll(v, -i0, axis=0)
        e = np.roll(v, -1, axis=0) - v
        ang = np.mod(np.arctan2(e[:, 1], e[:, 0]) + 0.0, 2.0 * np.pi)
        parts.append((ang, e))
        start = start + v[0]
    ang = np.concatenate([parts[0][0], parts[1][0]])
    e = np.concatenate([parts[0][1], parts[1][1]])
    order = np.argsort(ang, kind="stable")
    pts = start + np.vstack([np.zeros(2), np.cumsum(e[order][:-1], axis=0)])
    return ConvexPolygon(_simplify(pts))


def _halfplane_cycle(nx, ny, c) -> Optional[list]:
    """Deque sweep over half-planes pre-sorted by normal angle.

    Returns the list of active plane indices in CCW order, or ``None`` when the
    intersection has no interior.  Inputs are plain Python lists.
    """

    def meet(i, j):
        a1, b1, c1 = nx[i], ny[i], c[i]
        a2, b2, c2 = nx[j], ny[j], c[j]
        det = a1 * b2 - b1 * a2
        return (c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det

    dq: list = []
    head = 0
    for i in range(len(c)):
        a, b, ci = nx[i], ny[i], c[i]
        while len(dq) - head >= 2:
            x, y = meet(dq[-1], dq[-2])
            if a * x + b * y > ci:
                dq.pop()
            else:
                break
        while len(dq) - head >= 2:
            x, y = meet(dq[head], dq[head + 1])
            if a * x + b * y > ci:
                head += 1
            else:
                break
        if len(dq) - head > 0:
            j = dq[-1]
            if abs(a * ny[j] - b * nx[j]) < 1e-14:
                if a * nx[j] + b * ny[j] < 0.0:
                    return None
                if ci < c[j]:
                    dq.pop()
                else:
                    continue
        dq.append(i)
    dq = dq[head:]
    while len(dq) > 2:
        x, y = meet(dq[-1], dq[-2])
        k = dq[0]
        if nx[k] * x + ny[k] * y > c[k]:
            dq.pop()
        else:
            break
    while len(dq) > 2:
        x, y = meet(dq[0], dq[1])
        k = dq[-1]
        if nx[k] * x + ny[k] * y > c[k]:
            dq.pop(0)
        else:
            break
    if len(dq) < 3:
        return None
    return dq


def _cycle_vertices(nx, ny, c, cycle) -> np.ndarray:
    a = np.asarray(cycle)
    b = np.roll(a, -1)
    nxa, nya, nxb, nyb = np.asarray(nx)[a], np.asarray(ny)[a], np.asarray(nx)[b], np.asarray(ny)[b]
    ca, cb = np.asarray(c)[a], np.asarray(c)[b]
    det = nxa * nyb - nya * nxb
    if np.any(det <= 0.0):
        # consecutive active planes must turn left; otherwise the region is empty
        return np.empty((0, 2))
    return np.column_stack([(ca * nyb - cb * nya) / det, (nxa * cb - nxb * ca) / det])


def intersect_halfplanes(planes: Iterable[HalfPlane]) -> Optional[ConvexPolygon]:
    """Bounded intersection of half-planes, or ``None`` if it has no interior.

    Sorted by normal angle; ties keep the smaller offset.  Raises
    :class:`DegenerateInput` when the intersection is unbounded.
    """
    planes = list(planes)
    if not planes:
        raise DegenerateInput("no half-planes given")
    big = 1e6 * (1.0 + max(abs(p.offset) for p in planes))
    box = [HalfPlane((1.0, 0.0), big), HalfPlane((0.0, 1.0), big),
           HalfPlane((-1.0, 0.0), big), HalfPlane((0.0, -1.0), big)]
    allp = planes + box
    nx = np.array([p.normal[0] for p in allp])
    ny = np.array([p.normal[1] for p in allp])
    c = np.array([p.offset for p in allp])
    order = np.lexsort((c, np.arctan2(ny + 0.0, nx)))
    nx, ny, c = nx[order], ny[order], c[order]
    cycle = _halfplane_cycle(nx.tolist(), ny.tolist(), c.tolist())
    if cycle is None:
        return None
    is_box = order[np.asarray(cycle)] >= len(planes)
    if is_box.any():
        raise DegenerateInput("half-plane intersection is unbounded")
    verts = _cycle_vertices(nx, ny, c, cycle)
    return _region_or_none(verts)


def _region_or_none(verts: np.ndarray) -> Optional[ConvexPolygon]:
    if len(verts) < 3:
        return None
    scale = _diameter_bound(verts)
    if _signed_area(verts) <= TAU_GEOM * max(scale, TAU_GEOM) ** 2:
        return None
    v = _simplify(verts)
    if len(v) < 3 or _signed_area(v) <= 0.0:
        return None
    return ConvexPolygon(v)


class Eroder:
    """Repeated erosions ``Omega - rho K`` for a fixed pair (Omega, K).

    The edge normals of ``Omega`` are sorted once and the support values of
    ``K`` along them are cached, so each call only shifts the offsets.
    """

    def __init__(self, omega: ConvexPolygon, K: Anisotropy):
        normals = omega.normals
        order = np.argsort(np.arctan2(normals[:, 1] + 0.0, normals[:, 0]), kind="stable")
        self.omega = omega
        self.nx = normals[order, 0]
        self.ny = normals[order, 1]
        self.h = omega.offsets[order]
        self.phi = K.support(normals[order])
        self._nx_list = self.nx.tolist()
        self._ny_list = self.ny.tolist()

    def vertices(self, rho: float) -> np.ndarray:
        if rho < 0:
            raise NegativeRho(f"rho must be nonnegative, got {rho}")
        if rho == 0.0:
            return self.omega.vertices.copy()
        c = self.h - rho * self.phi
        cycle = _halfplane_cycle(self._nx_list, self._ny_list, c.tolist())
        if cycle is None:
            return np.empty((0, 2))
        return _cycle_vertices(self.nx, self.ny, c, cycle)

    def area(self, rho: float) -> float:
        """Area of the erosion, ``0`` when it has no interior."""
        v = self.vertices(rho)
        if len(v) < 3:
            return 0.0
        return max(_signed_area(v), 0.0)

    def polygon(self, rho: float) -> Optional[ConvexPolygon]:
        if rho == 0.0:
            return self.omega
        return _region_or_none(self.vertices(rho))


def erode(Omega: ConvexPolygon, K: Anisotropy, rho: float) -> Optional[ConvexPolygon]:
    """Inner parallel body ``Omega - rho K``; ``None`` when it is empty."""
    if rho < 0:
        raise NegativeRho(f"rho must be nonnegative, got {rho}")
    return Eroder(Omega, K).polygon(rho)


def anisotropic_perimeter(E: ConvexPolygon, K: Union[Anisotropy, ConvexPolygon]) -> float:
    """Sum over edges of length times the polar norm of the outward normal."""
    e = E.edges
    scaled_normals = np.column_stack([e[:, 1], -e[:, 0]])
    return float(support_values(_body_vertices(K), scaled_normals).sum())


def point_distances(P: ConvexPolygon, points: PointsLike) -> np.ndarray:
    """Euclidean distance from each point to the closed region ``P``."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    a = P.vertices
    e = P.edges
    ee = np.einsum("ij,ij->i", e, e)
    out = np.empty(len(p))
    inside = P.contains(p)
    for start in range(0, len(p), _CHUNK):
        block = p[start:start + _CHUNK]
        rel = block[:, None, :] - a[None, :, :]
        t = np.clip(np.einsum("pij,ij->pi", rel, e) / ee, 0.0, 1.0)
        diff = rel - t[:, :, None] * e[None, :, :]
        out[start:start + _CHUNK] = np.sqrt((diff * diff).sum(axis=2).min(axis=1))
    out[inside] = 0.0
    return out


def hausdorff_distance(P: ConvexPolygon, Q: ConvexPolygon) -> float:
    """Hausdorff distance between the closed regions (vertices suffice by convexity)."""
    return float(max(point_distances(Q, P.vertices).max(), point_distances(P, Q.vertices).max()))
