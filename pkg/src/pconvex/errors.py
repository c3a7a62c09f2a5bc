"""Exception hierarchy shared by all modules."""


class PConvexError(Exception):
    """Base class for every error raised by the package."""


class InvalidMatrix(PConvexError, ValueError):
    pass


class DimensionError(PConvexError, ValueError):
    pass


class InvalidP(PConvexError, ValueError):
    pass


class RankError(PConvexError, ValueError):
    pass


class EvaluationError(PConvexError, ArithmeticError):
    pass


class CatalogError(PConvexError, ValueError):
    pass


class ExpressionError(PConvexError, ValueError):
    pass


class ProjectionError(PConvexError, RuntimeError):
    """Nearest-point projection did not converge; the point lies outside the reliable collar."""


class DegenerateGradient(PConvexError, ArithmeticError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class SamplingError(PConvexError, RuntimeError):
    pass


class FrameError(PConvexError, ValueError):
    pass


class ConstructionError(PConvexError, RuntimeError):
    pass


class NotPConvex(PConvexError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotPseudoconvex(PConvexError):
    pass


class ImageOutsideDomain(PConvexError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MapError(PConvexError, ValueError):
    """A parametrized patch fails the conformal-harmonic identities."""


class NotOnBoundary(PConvexError, ValueError):
    pass
