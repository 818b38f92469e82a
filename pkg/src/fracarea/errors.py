"""Exception hierarchy shared by every module of the package."""


class FracAreaError(Exception):
    """Base class for all package errors."""


class GeometryError(FracAreaError, ValueError):
    """Invalid hypersurface input."""


class DegenerateFacet(GeometryError):
    pass


class SelfIntersection(GeometryError):
    pass


class NonOrientable(GeometryError):
    pass


class NonManifoldEdge(GeometryError):
    pass


class PointNotOnSurface(FracAreaError, ValueError):
    pass


class BoundaryPoint(FracAreaError, ValueError):
    """Evaluation point closer to the boundary than the excision radius."""


class NonConvergent(FracAreaError, RuntimeError):
    """Too many indeterminate (tangent) samples."""


class NotSmooth(FracAreaError, ValueError):
    pass


class NotContained(FracAreaError, ValueError):
    pass


class StepRejected(FracAreaError, RuntimeError):
    pass


class InvalidState(FracAreaError, ValueError):
    pass


class ConfigError(FracAreaError, ValueError):
    pass
