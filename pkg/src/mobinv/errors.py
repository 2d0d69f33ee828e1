"""Exception types shared across the package."""


class MobinvError(Exception):
    """Base class for all package errors."""


class SingularPoint(MobinvError):
    """A point coincides (within guard radius) with an inversion center or pole.

    `index` is the offending row when a batch of points was being mapped.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DimensionMismatch(MobinvError):
    """Operands live in different dimensions, or an operation needs another dimension."""


class PoleAtInput(MobinvError):
    """Complex Moebius evaluation at (or too close to) the pole -d/c."""


class ParseError(MobinvError):
    """Mesh file could not be parsed; message carries the line number."""


class NonTriangleFace(MobinvError):
    """Mesh file contains a face with a vertex count other than 3."""


class NonManifoldVertex(MobinvError):
    """Incident faces around a vertex do not form a single fan."""


class TooFewNeighbors(MobinvError):
    """A vertex has fewer 1-ring neighbors than the fit requires."""


class DegenerateTriangle(MobinvError):
    """A triangle has (numerically) zero area in the relevant geometry."""


class EmptyCorrespondence(MobinvError):
    """No vertex pairs to compare."""


class AllDimensionsDegenerate(MobinvError):
    """Every descriptor dimension was dropped during standardization."""
