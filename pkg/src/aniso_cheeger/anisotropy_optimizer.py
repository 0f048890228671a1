"""Derivative-free minimization of ``K -> J_Omega[K]`` over centrally
symmetric polygons with ``p`` antipodal vertex pairs.

A candidate is described by radii and angles; the vertex set is
``{+-r_j (cos a_j, sin a_j)}`` and the anisotropy is its convex hull, so a
pair that falls inside the hull is simply dropped.  The search runs
Nelder-Mead from several seeded starts on log-radii and softmax angle gaps.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from .cheeger_solver import EPS_ROOT, functionals
from .errors import BadParameter, DegenerateInput, ParamsDegenerate
from .planar_convex import (
    Anisotropy,
    ConvexPolygon,
    hausdorff_distance,
)

R_MIN, R_MAX = 1e-3, 1e3
DEFAULT_STARTS = 8
DEFAULT_BUDGET = 2000
SPREAD_TOL = 1e-8
THREADS_ENV = "ANISO_CHEEGER_THREADS"


@dataclass(frozen=True)
class AnisotropyParams:
    radii: Tuple[float, ...]
    angles: Tuple[float, ...]

    def __post_init__(self):
        r = tuple(float(x) for x in self.radii)
        a = tuple(float(x) for x in self.angles)
        if len(r) != len(a) or len(r) < 2:
            raise BadParameter("need at least two (radius, angle) pairs of equal length")
        if any(not (R_MIN * (1 - 1e-12) <= x <= R_MAX * (1 + 1e-12)) for x in r):
            raise BadParameter(f"radii must lie in [{R_MIN}, {R_MAX}]")
        if any(not 0.0 <= x < math.pi for x in a) or any(b <= c for c, b in zip(a, a[1:])):
            raise BadParameter("angles must be strictly increasing in [0, pi)")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "angles", a)

    @classmethod
    def normalized(cls, radii: Sequence[float], angles: Sequence[float]) -> "AnisotropyParams":
        """Fold angles into ``[0, pi)`` (flipping to the antipode) and sort."""
        a = np.mod(np.asarray(angles, dtype=float), math.pi)
        a[a >= math.pi] = 0.0
        r = np.clip(np.asarray(radii, dtype=float), R_MIN, R_MAX)
        order = np.argsort(a, kind="stable")
        return cls(tuple(r[order]), tuple(a[order]))

    @property
    def pairs(self) -> int:
        return len(self.radii)

    def points(self) -> np.ndarray:
        r = np.asarray(self.radii)
        a = np.asarray(self.angles)
        half = np.column_stack([r * np.cos(a), r * np.sin(a)])
        return np.vstack([half, -half])

    def anisotropy(self) -> Anisotropy:
        try:
            return Anisotropy.from_points(self.points(), warn=False)
        except DegenerateInput as exc:
            raise ParamsDegenerate(str(exc)) from exc

    def scaled(self, t: float) -> "AnisotropyParams":
        return AnisotropyParams(tuple(t * x for x in self.radii), self.angles)

    def to_dict(self) -> dict:
        return {"radii": list(self.radii), "angles": list(self.angles)}


def regular_params(p: int, radius: float = 1.0, phase: float = 0.0) -> AnisotropyParams:
    """Regular ``2p``-gon of circumradius ``radius``."""
    return AnisotropyParams.normalized([radius] * p, phase + math.pi * np.arange(p) / p)


@dataclass
class StartResult:
    seed: int
    best: AnisotropyParams
    best_J: float
    evaluations: int
    converged: bool
    iterates: List[Tuple[AnisotropyParams, float]] = field(repr=False, default_factory=list)


@dataclass
class OptimizerTrace:
    iterates: List[Tuple[AnisotropyParams, float]]
    best: AnisotropyParams
    best_J: float
    evaluations: int
    converged: bool
    starts: List[StartResult] = field(default_factory=list, repr=False)
    local_minima: List[Tuple[AnisotropyParams, float]] = field(default_factory=list)

    def best_so_far(self) -> List[float]:
        """Running minimum of J over each start's iterates, start by start."""
        out, cur = [], math.inf
        for _, j in self.iterates:
            cur = min(cur, j)
            out.append(cur)
        return out

    def to_dict(self) -> dict:
        return {
            "best": self.best.to_dict(),
            "best_J": self.best_J,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "starts": [
                {"seed": s.seed, "best_J": s.best_J, "evaluations": s.evaluations,
                 "converged": s.converged, "best": s.best.to_dict()}
                for s in self.starts
            ],
            "local_minima": [{"J": j, **prm.to_dict()} for prm, j in self.local_minima],
        }


def objective(Omega: ConvexPolygon, params: AnisotropyParams, eps_root: float = EPS_ROOT) -> float:
    """``J_Omega[K] = h_K(Omega) |K°|^(1/2)`` for the hull of the parameter vertices."""
    return functionals(Omega, params.anisotropy(), eps_root).J


def is_rotation_invariant(Omega: ConvexPolygon, min_vertices: int = 16) -> bool:
    """True for regular polygons with many sides (disc stand-ins)."""
    if len(Omega) < min_vertices:
        return False
    rel = Omega.vertices - Omega.centroid
    dist = np.hypot(rel[:, 0], rel[:, 1])
    lengths = Omega.edge_lengths
    return bool(np.ptp(dist) <= 1e-9 * dist.max() and np.ptp(lengths) <= 1e-9 * lengths.max())


class _Encoding:
    """Vector <-> parameters.  Layout: ``p`` log-radii, ``p-1`` gap logits,
    and, unless the rotation is pinned, one leading angle."""

    def __init__(self, p: int, fix_rotation: bool):
        self.p = p
        self.fix_rotation = fix_rotation
        self.dim = 2 * p - 1 + (0 if fix_rotation else 1)

    def decode(self, z: np.ndarray) -> AnisotropyParams:
        p = self.p
        logr = np.clip(z[:p], math.log(R_MIN), math.log(R_MAX))
        logits = np.concatenate([[0.0], z[p:2 * p - 1]])
        w = np.exp(logits - logits.max())
        gaps = math.pi * w / w.sum()
        angles = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
        if not self.fix_rotation:
            angles = angles + z[2 * p - 1]
        return AnisotropyParams.normalized(np.exp(logr), angles)

    def random_start(self, rng: np.random.Generator, regular: bool) -> np.ndarray:
        z = np.zeros(self.dim)
        if not regular:
            z[: self.p] = rng.normal(0.0, 0.3, self.p)
            z[self.p: 2 * self.p - 1] = rng.normal(0.0, 0.5, self.p - 1)
        if not self.fix_rotation:
            z[-1] = rng.uniform(0.0, math.pi)
        return z

    def initial_simplex(self, z0: np.ndarray) -> np.ndarray:
        steps = np.full(self.dim, 0.3)
        steps[: self.p] = 0.2
        if not self.fix_rotation:
            steps[-1] = 0.25
        return np.vstack([z0] + [z0 + steps[i] * np.eye(self.dim)[i] for i in range(self.dim)])


def _run_start(Omega, enc: _Encoding, seed: int, regular: bool, budget: int, eps_root: float) -> StartResult:
    rng = np.random.default_rng(seed)
    z0 = enc.random_start(rng, regular)
    iterates: List[Tuple[AnisotropyParams, float]] = []

    def fun(z):
        if len(iterates) >= budget:
            # scipy may overshoot maxfev inside one iteration
            return math.inf
        try:
            params = enc.decode(z)
        except BadParameter:
            # two angles collapsed; nothing to record
            return math.inf
        try:
            val = objective(Omega, params, eps_root)
        except ParamsDegenerate:
            val = math.inf
        iterates.append((params, val))
        return val

    res = scipy_minimize(
        fun,
        z0,
        method="Nelder-Mead",
        options={
            "initial_simplex": enc.initial_simplex(z0),
            "maxfev": budget,
            "maxiter": 10 * budget,
            "fatol": SPREAD_TOL,
            "xatol": math.inf,
            "adaptive": False,
        },
    )
    finite = [(prm, j) for prm, j in iterates if math.isfinite(j)]
    if not finite:
        raise ParamsDegenerate(f"start {seed}: every evaluated candidate was degenerate")
    best, best_J = min(finite, key=lambda t: t[1])
    converged = bool(res.success) and len(iterates) < budget
    return StartResult(seed, best, best_J, len(iterates), converged, iterates)


def _normalized_body(params: AnisotropyParams) -> ConvexPolygon:
    body = params.anisotropy().body
    return body.scaled(1.0 / math.sqrt(body.area))


def _cluster_minima(results: Sequence[StartResult], radius: float) -> List[Tuple[AnisotropyParams, float]]:
    reps: List[Tuple[AnisotropyParams, float, ConvexPolygon]] = []
    for r in sorted(results, key=lambda s: s.best_J):
        body = _normalized_body(r.best)
        if all(hausdorff_distance(body, other) > radius for _, _, other in reps):
            reps.append((r.best, r.best_J, body))
    return [(prm, j) for prm, j, _ in reps]


def _worker_count(requested: Optional[int], starts: int) -> int:
    """``requested`` (default 1), capped by ``$ANISO_CHEEGER_THREADS`` and ``starts``."""
    n = requested if requested is not None else 1
    cap = os.environ.get(THREADS_ENV, "").strip()
    if cap.isdigit() and int(cap) > 0:
        n = min(n, int(cap))
    return max(1, min(n, starts))


def minimize(
    Omega: ConvexPolygon,
    p: int = 2,
    starts: int = DEFAULT_STARTS,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    *,
    fix_rotation: Optional[bool] = None,
    eps_root: float = EPS_ROOT,
    workers: Optional[int] = None,
    cluster_radius: float = 1e-2,
) -> OptimizerTrace:
    """Multi-start Nelder-Mead over ``p`` antipodal vertex pairs.

    ``budget`` caps objective evaluations per start.  ``fix_rotation`` pins the
    first vertex to angle 0 and defaults to whether ``Omega`` looks like a
    disc.  Start ``i`` draws from ``SeedSequence(seed).spawn(starts)[i]``, and
    start 0 is the regular ``2p``-gon, so results do not depend on
    ``workers``.
    """
    if int(p) != p or p < 2:
        raise BadParameter(f"p must be an integer >= 2, got {p}")
    if budget < 1 or starts < 1:
        raise BadParameter("budget and starts must be positive")
    if fix_rotation is None:
        fix_rotation = is_rotation_invariant(Omega)
    enc = _Encoding(int(p), fix_rotation)
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(starts)]
    jobs = [(Omega, enc, s, i == 0, budget, eps_root) for i, s in enumerate(seeds)]

    n_workers = _worker_count(workers, starts)
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(_run_start, *zip(*jobs)))
    else:
        results = [_run_start(*job) for job in jobs]

    winner = min(results, key=lambda r: r.best_J)
    iterates = [it for r in results for it in r.iterates]
    return OptimizerTrace(
        iterates=iterates,
        best=winner.best,
        best_J=winner.best_J,
        evaluations=sum(r.evaluations for r in results),
        converged=winner.converged,
        starts=results,
        local_minima=_cluster_minima(results, cluster_radius),
    )


def rectangle(aspect: float) -> AnisotropyParams:
    """Origin-centred rectangle of area 1 with side ratio ``aspect``, as params."""
    if not aspect >= 1.0:
        raise BadParameter(f"aspect must be >= 1, got {aspect}")
    a = math.sqrt(aspect)  # sides a x 1/a
    half_diag = 0.5 * math.hypot(a, 1.0 / a)
    t = math.atan2(1.0 / a, a)
    return AnisotropyParams.normalized([half_diag, half_diag], [t, math.pi - t])


def divergence_probe(
    Omega: ConvexPolygon, aspect_list: Sequence[float], eps_root: float = EPS_ROOT
) -> List[Tuple[float, float]]:
    """``J_Omega`` on unit-area rectangles of increasing elongation."""
    return [(float(a), objective(Omega, rectangle(a), eps_root)) for a in aspect_list]


def divergence_sweep(
    Omega: ConvexPolygon,
    threshold: float = 100.0,
    max_doublings: int = 40,
    eps_root: float = EPS_ROOT,
) -> List[Tuple[float, float]]:
    """Double the aspect ratio from 1 until ``J`` exceeds ``threshold``."""
    out = []
    aspect = 1.0
    for _ in range(max_doublings + 1):
        out.extend(divergence_probe(Omega, [aspect], eps_root))
        if out[-1][1] > threshold:
            break
        aspect *= 2.0
    return out


__all__ = [
    "AnisotropyParams",
    "OptimizerTrace",
    "StartResult",
    "divergence_probe",
    "divergence_sweep",
    "is_rotation_invariant",
    "minimize",
    "objective",
    "rectangle",
    "regular_params",
]
