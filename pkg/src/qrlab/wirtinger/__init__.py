"""Wirtinger derivatives, distortion sweeps and differential-inclusion diagnostics."""

from .distortion import (
    DistortionReport,
    HomotopyTable,
    Predicate,
    cone,
    distortion_sweep,
    halfspace,
    homotopy_distortion,
    homotopy_ratio_formula,
    inclusion,
    jacobian_floor,
    parse_predicate,
    qr,
    re_fz_at_least,
    re_fz_nonneg,
    re_fz_zero,
    reduced_beltrami,
    reduced_beltrami_multiplier,
    sector,
)
from .jets import (
    WirtingerJet,
    boundary_band,
    derivative,
    finite_difference_jets,
    gradient_field,
    jet_autodiff,
    jet_finite_difference,
    map_jets,
)
from .linalg import (
    HalfSpaceKind,
    InclusionResult,
    InclusionSpec,
    RealMatrix2,
    classify_halfspace,
    frobenius_constant,
    in_inclusion,
    inner,
    jet_to_matrix,
    matrix_to_jet,
)
