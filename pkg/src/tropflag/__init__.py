"""Exact tools for flag Dressians: tropical relations, regular subdivisions
of weight polytopes, and matroid concordance."""

from .core import INF, DomainError, ParseError, Rational, Subset, complement, enumerate_subsets
from .tropical import (
    FlagInstance,
    FlagReport,
    PluckerVector,
    TropPoint,
    check_flag,
    check_incidence,
    check_plucker,
    cocircuit,
    dualize,
    point_in_space,
    trop_vanishes,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "DomainError",
    "ParseError",
    "Rational",
    "Subset",
    "complement",
    "enumerate_subsets",
    "FlagInstance",
    "FlagReport",
    "PluckerVector",
    "TropPoint",
    "check_flag",
    "check_incidence",
    "check_plucker",
    "cocircuit",
    "dualize",
    "point_in_space",
    "trop_vanishes",
    "__version__",
]
