"""Matrix-logarithm branches ("system aliases") for identifying continuous-time
linear systems from slowly sampled data."""

from .aliasing import (
    AliasCandidate,
    AliasFunctionalContext,
    AliasSet,
    alias_functional,
    are_equivalent,
    branch_search_box,
    enumerate_aliases,
    max_sampling_period,
    min_sampling_frequency,
    uniqueness_window,
    z_weighted_norm,
)
from .identify import (
    SelectionOperator,
    SparsityPrior,
    build_D_initial_points,
    build_D_trajectory,
    linear_identifiability,
    recover_system,
    recover_perturbation,
    solve_linearized,
)
from .linalg import SpectralDecomposition, kernel_basis, l0_count, rank_of, spectral_decompose
from .matfunc import (
    first_order_residual,
    frechet_exp,
    frechet_log,
    kron_K,
    log_branch,
    mat_exp,
    principal_log,
)
from .pipeline import (
    IdentificationReport,
    Tolerances,
    Trajectory,
    estimate_Ad,
    identify,
    simulate,
    snapshot_matrices,
    sparsest_alias,
)

__all__ = [
    "AliasCandidate",
    "AliasFunctionalContext",
    "AliasSet",
    "alias_functional",
    "are_equivalent",
    "branch_search_box",
    "enumerate_aliases",
    "max_sampling_period",
    "min_sampling_frequency",
    "uniqueness_window",
    "z_weighted_norm",
    "SelectionOperator",
    "SparsityPrior",
    "build_D_initial_points",
    "build_D_trajectory",
    "linear_identifiability",
    "recover_system",
    "recover_perturbation",
    "solve_linearized",
    "SpectralDecomposition",
    "kernel_basis",
    "l0_count",
    "rank_of",
    "spectral_decompose",
    "first_order_residual",
    "frechet_exp",
    "frechet_log",
    "kron_K",
    "log_branch",
    "mat_exp",
    "principal_log",
    "IdentificationReport",
    "Tolerances",
    "Trajectory",
    "estimate_Ad",
    "identify",
    "simulate",
    "snapshot_matrices",
    "sparsest_alias",
]

__version__ = "0.1.0"
