"""Self-similar phase-plane toolkit for porous-medium and p-Laplacian flows."""

from .equivalence import (
    Branch,
    EquivalenceReport,
    ple_preimage_dimensions,
    ple_to_pme,
    pme_branch_dimensions,
    pme_to_ple,
    self_map,
    verify_equivalence,
)
from .errors import (
    AnchorMismatchError,
    ComparisonError,
    CriticalError,
    DegenerateError,
    DimensionTwoError,
    DomainError,
    IntegrationFailure,
    OrientationError,
    OutsideSupportError,
    SingularEvaluationError,
    SsflowError,
    TruncationWarning,
    UnphysicalDimensionError,
)
from .integrator import IntegrationSettings, StopEvent, compare_trajectories, integrate
from .params import (
    CriticalExponents,
    PLEParams,
    PMEParams,
    Regime,
    SimilarityType,
    UnifiedCoefficients,
    alpha_from,
    classify_regime,
    critical_exponents,
    unified_coefficients,
)
from .phase_plane import (
    NativeStatePLE,
    NativeStatePME,
    PhaseState,
    ProfileSample,
    Trajectory,
    line_betas_ple,
    line_betas_pme,
    line_condition_value,
    ple_native_rhs_xy,
    ple_native_rhs_xz,
    ple_native_system_xy,
    ple_native_system_xz,
    ple_to_unified,
    ple_trajectory_to_unified,
    pme_native_rhs,
    pme_native_system,
    pme_to_unified,
    pme_trajectory_to_unified,
    profile_to_state,
    reconstruct_profile,
    straight_line,
    unified_rhs,
    unified_system,
    unified_to_ple,
    unified_to_pme,
    yamabe_curve,
)
from .solutions import (
    ClosedFormProfile,
    ProfileKind,
    barenblatt_ple,
    barenblatt_pme,
    dipole_derivative_ple,
    dipole_pme,
    loewner_nirenberg_pme,
    mass_integral,
    max_residual,
    ple_residual,
    pme_residual,
    selfsimilar_value,
    yamabe_ple,
)

__version__ = "0.1.0"
