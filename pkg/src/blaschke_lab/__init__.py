"""Weighted zero sums of analytic functions under non-radial growth envelopes."""

__version__ = "0.1.0"

from .core_math import (  # noqa: F401
    BoundaryPointSet,
    CircleClosedSet,
    SignedExponent,
    ahern_clark_type,
    brace_shorthand,
    circle_neighborhood_measure,
    dist_product_comparison,
    dist_to_finite_set,
    dist_to_positive_ray,
    neg_part,
    plus_part,
    principal_power,
)
from .conformal import (  # noqa: F401
    MapSample,
    StolzAngle,
    cayley_to_disk,
    cayley_to_halfplane,
    cut_distance_sandwich,
    cut_to_halfplane,
    disk_to_stolz,
    halfplane_comparisons,
    pommerenke_check,
    stolz_boundary_distance,
    stolz_contains,
    stolz_params,
    stolz_to_disk,
    stolz_to_disk_deriv_abs,
)
from .zerofind import (  # noqa: F401
    AnalyticFn,
    Box,
    CircleContour,
    ZeroRecord,
    ZeroSet,
    blaschke_product,
    envelope_exponential,
    jensen_residual,
    locate_zeros,
    product,
    winding_number,
)
from .sums import (  # noqa: F401
    EnvelopeSpec,
    KhatGrid,
    SumReport,
    beta_level,
    closed_set_sum,
    collapsed_sum,
    cut_exponents,
    cut_sum,
    disk_sum,
    dyadic_k0,
    dyadic_profile,
    estimate_growth_constant,
    evaluate_sum,
    halfplane_exponents,
    halfplane_sum,
    origin_factor_sum,
    stolz_split_sum,
    two_region_sum,
    verify_bound,
)
