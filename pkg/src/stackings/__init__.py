"""Stackings, bislim structures and invariant staggerings of 2-complexes."""

from .complex import Corner, Letter, Side, Subcomplex, TwoComplex, validate
from .convert import (
    Certificate,
    ConversionError,
    DescentAmbiguity,
    HorizonError,
    NotGood,
    bs_to_is,
    convert,
    find_route,
    gs_to_bs,
    is_to_bs,
    is_to_gs,
    slope_projection_order,
    staggered_to_tis,
    tbs_to_tis,
    tis_to_is,
    tis_to_tbs,
)
from .cover import CoverData, Presentation, build_cayley_ball, identity_cover
from .orders import Relation
from .report import Report, Violation
from .stacking import Stacking, check_good, check_stacking, search_good_stacking
from .structures import (
    BislimStructure,
    ISStructure,
    StaggeredStructure,
    TISStructure,
    check_bislim,
    check_is,
    check_staggered,
    check_tis,
)

__all__ = [
    "BislimStructure",
    "Certificate",
    "ConversionError",
    "Corner",
    "CoverData",
    "DescentAmbiguity",
    "HorizonError",
    "ISStructure",
    "Letter",
    "NotGood",
    "Presentation",
    "Relation",
    "Report",
    "Side",
    "Stacking",
    "StaggeredStructure",
    "Subcomplex",
    "TISStructure",
    "TwoComplex",
    "Violation",
    "bs_to_is",
    "build_cayley_ball",
    "check_bislim",
    "check_good",
    "check_is",
    "check_stacking",
    "check_staggered",
    "check_tis",
    "convert",
    "find_route",
    "gs_to_bs",
    "identity_cover",
    "is_to_bs",
    "is_to_gs",
    "search_good_stacking",
    "slope_projection_order",
    "staggered_to_tis",
    "tbs_to_tis",
    "tis_to_is",
    "tis_to_tbs",
    "validate",
]
