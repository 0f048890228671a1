"""Anisotropic Cheeger constants of convex polygons.

For convex ``Omega`` the Cheeger set is ``Omega^rho + rho K`` where
``Omega^rho = Omega - rho K`` is the inner parallel body and ``rho`` is the
root of ``|Omega^rho| = rho^2 |K|``.  The root is found by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NegativeRho, NoBracket, ToleranceNotMet
from .planar_convex import (
    Anisotropy,
    ConvexPolygon,
    Eroder,
    minkowski_sum,
)

EPS_ROOT = 1e-12
MAX_ITER = 200
MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class CheegerResult:
    rho: float
    h: float
    inner_body: ConvexPolygon
    cheeger_set: ConvexPolygon
    residual: float
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "h": self.h,
            "residual": self.residual,
            "inner_body": {"vertices": self.inner_body.to_list()},
            "cheeger_set": {"vertices": self.cheeger_set.to_list()},
        }


@dataclass(frozen=True)
class FunctionalValues:
    """``F = h |K|^-1/2``, ``J = h |K°|^1/2`` and the Mahler volume ``|K||K°|``."""

    h: float
    F: float
    J: float
    mahler: float

    def to_dict(self) -> dict:
        return {"h": self.h, "F": self.F, "J": self.J, "mahler": self.mahler}


def rho_deficit(Omega: ConvexPolygon, K: Anisotropy, rho: float, *, _eroder: Eroder = None) -> float:
    """``|Omega - rho K| - rho^2 |K|``, with the empty set counted as area 0."""
    if rho < 0:
        raise NegativeRho(f"rho must be nonnegative, got {rho}")
    eroder = _eroder if _eroder is not None else Eroder(Omega, K)
    return eroder.area(rho) - rho * rho * K.area_body


def solve_cheeger(
    Omega: ConvexPolygon,
    K: Anisotropy,
    eps_root: float = EPS_ROOT,
    max_iter: int = MAX_ITER,
) -> CheegerResult:
    """Cheeger constant and Cheeger set of a convex polygon for anisotropy ``K``.

    The bracket starts at ``scale(Omega) / width(K)`` and doubles until the
    deficit turns negative.  Bisection stops once
    ``|deficit| <= eps_root * |Omega|``.
    """
    if not eps_root > 0:
        raise ValueError(f"eps_root must be positive, got {eps_root}")
    eroder = Eroder(Omega, K)
    area_k = K.area_body

    def f(r):
        return eroder.area(r) - r * r * area_k

    tol = eps_root * Omega.area
    lo, hi = 0.0, Omega.scale / K.body.width
    f_hi = f(hi)
    doublings = 0
    while f_hi >= 0.0:
        if doublings >= MAX_DOUBLINGS:
            raise NoBracket(f"deficit still nonnegative at rho = {hi}")
        lo = hi
        hi *= 2.0
        f_hi = f(hi)
        doublings += 1

    rho, f_mid = None, None
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if abs(f_mid) <= tol:
            rho = mid
            break
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    if rho is None:
        raise ToleranceNotMet(
            f"bisection stopped at rho in [{lo}, {hi}] with deficit {f_mid}, "
            f"tolerance {tol}"
        )

    inner = eroder.polygon(rho)
    if inner is None:
        # the deficit is tiny but positive area is required to assemble C_K
        raise ToleranceNotMet(f"inner body at rho = {rho} has no interior")
    cheeger_set = minkowski_sum(inner, K.body.scaled(rho))
    return CheegerResult(rho, 1.0 / rho, inner, cheeger_set, f_mid, it)


def cheeger_constant(Omega: ConvexPolygon, K: Anisotropy, eps_root: float = EPS_ROOT) -> float:
    return solve_cheeger(Omega, K, eps_root).h


def mahler_volume(K: Anisotropy) -> float:
    return K.area_body * K.area_polar


def functionals(Omega: ConvexPolygon, K: Anisotropy, eps_root: float = EPS_ROOT) -> FunctionalValues:
    h = solve_cheeger(Omega, K, eps_root).h
    return FunctionalValues(
        h=h,
        F=h / math.sqrt(K.area_body),
        J=h * math.sqrt(K.area_polar),
        mahler=mahler_volume(K),
    )
