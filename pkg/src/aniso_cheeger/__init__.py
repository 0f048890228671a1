"""Planar anisotropic Cheeger constants, polar bodies and Mahler volumes."""

from .cheeger_solver import (
    CheegerResult,
    FunctionalValues,
    functionals,
    mahler_volume,
    rho_deficit,
    solve_cheeger,
)
from .planar_convex import (
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
)

__version__ = "0.1.0"

__all__ = [
    "Anisotropy",
    "CheegerResult",
    "ConvexPolygon",
    "FunctionalValues",
    "HalfPlane",
    "anisotropic_perimeter",
    "area",
    "circumscribed_polygon",
    "disc",
    "erode",
    "functionals",
    "hausdorff_distance",
    "intersect_halfplanes",
    "mahler_volume",
    "make_polygon",
    "minkowski_sum",
    "polar_body",
    "regular_polygon",
    "rho_deficit",
    "solve_cheeger",
    "support_value",
]
