"""Dynamical r-matrix construction and verification toolkit."""

from .errors import (
    AlgebraMismatch,
    ConstructionFailure,
    ConvergenceFailure,
    DynrError,
    ModeUnavailable,
    PoleProximity,
    PropertyViolated,
    RootSumNonzero,
    SamplingExhausted,
    SearchExhausted,
    SpecInvalid,
    SubalgebraInvalid,
    TooLarge,
    UnsupportedType,
)
from .lie_core import (
    CartanVector,
    RootSystemData,
    SimpleLieAlgebra,
    build_root_system,
    build_simple_lie_algebra,
    casimir,
    fundamental_weights,
    pairing,
)
from .tensor_alg import Tensor2, Tensor3, act_diag, alt3, bracket_legs, norm, tensor_product
from .special_fn import ThetaParams, classical_series, coth_scaled, rho_fn, sigma_w, theta1
from .combinatorics import (
    PolarizationResult,
    RootSubset,
    enumerate_closed_subsets,
    find_polarization,
    is_closed_subset,
    span_closure,
)
from .rmatrix import (
    FAMILIES,
    SPECTRAL_FAMILIES,
    GaugeRecord,
    RMatrixSpec,
    effective_coupling,
    eval_constant,
    eval_dlambda,
    eval_rmatrix,
    eval_spectral,
    family_phi,
    gauge_apply,
    pole_margin,
    spec_from_json,
    spec_to_json,
    trig_constant_fixture,
)
from .verifier import (
    LimitComparison,
    LimitSchedule,
    SamplePlan,
    VerificationReport,
    affine_hat_spec,
    affine_series_check,
    cdybe_residual,
    cdybe_residual_constant,
    cdybe_residual_spectral,
    check_axioms,
    check_phi_triangle,
    extract_residue,
    limit_compare,
    reduce_pair_check,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraMismatch",
    "CartanVector",
    "ConstructionFailure",
    "ConvergenceFailure",
    "DynrError",
    "FAMILIES",
    "GaugeRecord",
    "LimitComparison",
    "LimitSchedule",
    "ModeUnavailable",
    "PolarizationResult",
    "PoleProximity",
    "PropertyViolated",
    "RMatrixSpec",
    "RootSubset",
    "RootSumNonzero",
    "RootSystemData",
    "SPECTRAL_FAMILIES",
    "SamplePlan",
    "SamplingExhausted",
    "SearchExhausted",
    "SimpleLieAlgebra",
    "SpecInvalid",
    "SubalgebraInvalid",
    "Tensor2",
    "Tensor3",
    "ThetaParams",
    "TooLarge",
    "UnsupportedType",
    "VerificationReport",
    "act_diag",
    "affine_hat_spec",
    "affine_series_check",
    "alt3",
    "bracket_legs",
    "build_root_system",
    "build_simple_lie_algebra",
    "casimir",
    "cdybe_residual",
    "cdybe_residual_constant",
    "cdybe_residual_spectral",
    "check_axioms",
    "check_phi_triangle",
    "classical_series",
    "coth_scaled",
    "effective_coupling",
    "enumerate_closed_subsets",
    "eval_constant",
    "eval_dlambda",
    "eval_rmatrix",
    "eval_spectral",
    "extract_residue",
    "family_phi",
    "find_polarization",
    "fundamental_weights",
    "gauge_apply",
    "is_closed_subset",
    "limit_compare",
    "norm",
    "pairing",
    "pole_margin",
    "reduce_pair_check",
    "rho_fn",
    "sigma_w",
    "spec_from_json",
    "spec_to_json",
    "span_closure",
    "tensor_product",
    "theta1",
    "trig_constant_fixture",
    "__version__",
]
