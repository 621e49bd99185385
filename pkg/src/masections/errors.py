"""Exception types shared across the package."""


class MasectionsError(Exception):
    """Base class for all package-specific errors."""


class DegenerateInput(MasectionsError):
    """Input point set is affinely degenerate (collinear or too small)."""


class ZeroArea(MasectionsError):
    """Polygon area is below tolerance; centroid undefined."""


class NoConvergence(MasectionsError):
    """Iteration cap exceeded before reaching the requested tolerance."""


class EmptyIntersection(MasectionsError):
    """Dilated ellipsoid never meets the admissible half-plane."""


class UnknownName(MasectionsError):
    """Requested catalog entry does not exist."""


class GrowthViolated(MasectionsError):
    """Boundary data violates the quadratic growth bounds.

    Carries the offending boundary point as ``witness``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TooCoarse(MasectionsError):
    """Grid has too few interior nodes for a meaningful solve."""


class NonConvexIterate(MasectionsError):
    """Solver iterate lost discrete convexity and repair failed."""


class EmptySection(MasectionsError):
    """Sublevel set contains too few grid nodes to form a section."""


class DegenerateCentroid(MasectionsError):
    """Section centroid sits on the tangent line; sliding map undefined."""


class NegativeValues(MasectionsError):
    """Solution dips below its tangent plane by more than tolerance."""


class TooFewRows(MasectionsError):
    """Not enough unflagged sweep rows to fit a power law."""


class KinkPoint(MasectionsError):
    """Barrier evaluated on the angular kink where it is not twice differentiable."""


class OutsideRegion(MasectionsError):
    """Point lies outside the barrier's validity region."""


class BoundaryDominanceFails(MasectionsError):
    """Barrier exceeds the solution on the comparison boundary.

    Carries the offending boundary point as ``witness``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
