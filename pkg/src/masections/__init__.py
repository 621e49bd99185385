"""Numerical study of boundary sections of the Monge-Ampere equation.

The package solves det D^2 u = f on convex planar domains whose boundary is
tangent to {x2 = 0} at the origin, extracts the sublevel sections
S_h = {u < h}, and measures how well they are approximated by slid
ellipsoids. It also machine-checks a small catalog of explicit barrier
functions against the equation.
"""

from .errors import (
    BoundaryDominanceFails,
    DegenerateCentroid,
    DegenerateInput,
    EmptyIntersection,
    EmptySection,
    GrowthViolated,
    KinkPoint,
    MasectionsError,
    NegativeValues,
    NoConvergence,
    NonConvexIterate,
    OutsideRegion,
    TooCoarse,
    TooFewRows,
    UnknownName,
    ZeroArea,
)
from .geometry import Ellipsoid, Polytope, area, centroid, convex_hull, dilation_factor, mvee
from .problems import (
    BoundaryData,
    ConvexDomain,
    ProblemSpec,
    load_problem,
    make_standard_problem,
    save_problem,
    validate_domain,
    validate_growth,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryData",
    "BoundaryDominanceFails",
    "ConvexDomain",
    "DegenerateCentroid",
    "DegenerateInput",
    "Ellipsoid",
    "EmptyIntersection",
    "EmptySection",
    "GrowthViolated",
    "KinkPoint",
    "MasectionsError",
    "NegativeValues",
    "NoConvergence",
    "NonConvexIterate",
    "OutsideRegion",
    "Polytope",
    "ProblemSpec",
    "TooCoarse",
    "TooFewRows",
    "UnknownName",
    "ZeroArea",
    "area",
    "centroid",
    "convex_hull",
    "dilation_factor",
    "load_problem",
    "make_standard_problem",
    "mvee",
    "save_problem",
    "validate_domain",
    "validate_growth",
    "__version__",
]
