"""Exception hierarchy shared by the geometry, solver and CLI layers."""


class AnisoCheegerError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(AnisoCheegerError, ValueError):
    pass


class DegenerateInput(GeometryError):
    """Points are collinear, coincident, or otherwise span no area."""


class NonFinite(GeometryError):
    pass


class BadParameter(GeometryError):
    pass


class ZeroDirection(GeometryError):
    pass


class OriginNotInterior(GeometryError):
    pass


class NegativeRho(GeometryError):
    pass


class OutOfRange(GeometryError):
    pass


class ParamsDegenerate(GeometryError):
    """Optimizer parameters produced a polygon with no interior."""


class SolverError(AnisoCheegerError, RuntimeError):
    pass


class NoBracket(SolverError):
    pass


class ToleranceNotMet(SolverError):
    pass
