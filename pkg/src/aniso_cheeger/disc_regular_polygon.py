"""Closed-form Cheeger analytics for the unit disc with a regular polygon
anisotropy.

``P*_n`` is the regular ``n``-gon (``n >= 4`` even) with apothem 1 and two
sides parallel to the y-axis.  The Cheeger set of the unit disc in its metric
has ``n`` straight sides of half-length ``x`` joined by arcs of the circle;
``x_bar`` solves ``arcsin(x) + x sqrt(1 - x^2) = pi / n``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, List, Tuple

from .errors import BadParameter, OutOfRange

SQRT_PI = math.sqrt(math.pi)
J_LIMIT = 2.0 * SQRT_PI

TABLE1_N = (4, 6, 8, 10, 50, 100, 200)


@dataclass(frozen=True)
class DiscAnalytics:
    n: int
    x_bar: float
    h: float
    J: float
    x_lower: float
    x_upper: float
    J_lower: float
    J_upper: float

    def as_dict(self) -> dict:
        return asdict(self)


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 4 or n % 2:
        raise BadParameter(f"n must be an even integer >= 4, got {n}")
    return int(n)


def _half_side_residual(x: float, n: int) -> float:
    return math.asin(x) + x * math.sqrt(1.0 - x * x) - math.pi / n


def solve_half_side(n: int, tol: float = 1e-15, max_iter: int = 100) -> float:
    """Unique root of ``arcsin(x) + x sqrt(1-x^2) = pi/n`` in ``(0, sin(pi/n))``.

    Newton on the bracket, falling back to bisection whenever a step leaves
    it.  The derivative of the left-hand side is ``2 sqrt(1 - x^2)``.
    """
    n = _check_n(n)
    lo, hi = 0.0, math.sin(math.pi / n)
    x = 0.5 * math.pi / n  # small-angle guess
    for _ in range(max_iter):
        g = _half_side_residual(x, n)
        if g > 0.0:
            hi = x
        elif g < 0.0:
            lo = x
        else:
            return x
        step = g / (2.0 * math.sqrt(1.0 - x * x))
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(1.0, abs(x)) or hi - lo <= tol:
            return x_new
        x = x_new
    return x


def cheeger_constant_disc(n: int) -> float:
    n = _check_n(n)
    return math.tan(math.pi / n) / solve_half_side(n)


def polygon_areas(n: int) -> Tuple[float, float]:
    """``(|P*_n|, |(P*_n)°|) = (n tan(pi/n), n sin(pi/n) cos(pi/n))``."""
    n = _check_n(n)
    t = math.pi / n
    return n * math.tan(t), n * math.sin(t) * math.cos(t)


def functional_J_disc(n: int) -> float:
    n = _check_n(n)
    t = math.pi / n
    return cheeger_constant_disc(n) * math.sqrt(n * math.cos(t) * math.sin(t))


def _check_x(n: int, x: float) -> None:
    if not 0.0 <= x <= math.sin(math.pi / n):
        raise OutOfRange(f"x must lie in [0, sin(pi/{n})], got {x}")


def competitor_area(n: int, x: float) -> float:
    """Area of the disc cut by ``n`` chords of half-length ``x``."""
    n = _check_n(n)
    _check_x(n, x)
    return 2 * n * (0.5 * x * math.sqrt(1.0 - x * x) + math.pi / (2 * n) - 0.5 * math.asin(x))


def competitor_perimeter(n: int, x: float) -> float:
    """Perimeter of the same set measured in the ``P*_n`` metric."""
    n = _check_n(n)
    _check_x(n, x)
    t = math.pi / n
    return 2 * n * (x + math.sin(t - math.asin(x)) / math.cos(t))


def bounds(n: int) -> Tuple[float, float, float, float]:
    """``(x_lower, x_upper, J_lower, J_upper)`` from the isoperimetric and
    inscribed-Wulff-shape comparisons."""
    n = _check_n(n)
    t = math.pi / n
    x_lower = 0.5 * math.sin(t)
    x_upper = 0.5 * SQRT_PI * math.sqrt(math.tan(t) / n)
    J_lower = 2.0 * n / SQRT_PI * math.sin(t)
    J_upper = 2.0 * math.sqrt(n * math.tan(t))
    return x_lower, x_upper, J_lower, J_upper


def analyze(n: int) -> DiscAnalytics:
    n = _check_n(n)
    x_bar = solve_half_side(n)
    t = math.pi / n
    h = math.tan(t) / x_bar
    J = h * math.sqrt(n * math.cos(t) * math.sin(t))
    return DiscAnalytics(n, x_bar, h, J, *bounds(n))


def table1(n_list: Iterable[int] = TABLE1_N) -> List[DiscAnalytics]:
    return [analyze(n) for n in n_list]


def limit_row() -> dict:
    """The ``n -> infinity`` benchmark row: the disc is its own optimal Wulff shape."""
    return {"n": "inf", "x_bar": 0.0, "J": J_LIMIT}


def truncate(value: float, digits: int = 4) -> str:
    """Decimal truncation (not rounding) for the human-readable table."""
    scale = 10 ** digits
    # round away representation noise first so 0.24999999999999997 reads 0.2500
    return f"{math.trunc(round(value * scale, 6)) / scale:.{digits}f}"


def figure_series(count: int = 100) -> List[DiscAnalytics]:
    """Records for the first ``count`` even ``n >= 4``."""
    return [analyze(4 + 2 * k) for k in range(count)]
