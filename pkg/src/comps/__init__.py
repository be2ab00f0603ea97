"""Boltzmann-machine wave functions as constrained tensor networks.

Exact mappings from restricted and unrestricted Boltzmann-machine quantum
states to matrix product states and torus PEPS with few-parameter entries,
transfer-matrix evaluation of periodic Ising-ring observables, global
variational optimization by random subspace rotations, and finite-size
scaling of the resulting energy errors.
"""

from importlib.metadata import PackageNotFoundError, version as _version

from .ansatz import (
    RBM_MAX_HIDDEN_DENSE,
    RBM_MAX_HIDDEN_DIAGONAL,
    URBM_MAX_DIRECT_BITS,
    RbmParameters,
    UrbmParameters,
    build_rbm_sigma,
    build_urbm_ab,
    build_urbm_site_tensor,
    hidden_spin_table,
    random_rbm_parameters,
    rbm_amplitude,
    rbm_sigma_diagonals,
    rbm_trace_amplitude,
    urbm_amplitude_direct,
    urbm_rung_matrix,
    urbm_site_tensors,
)
from .copeps import (
    CopepsBlock,
    Urbm2dParameters,
    build_copeps_block,
    copeps_amplitude_torus,
    copeps_hidden_factor,
    copeps_visible_factor,
    urbm2d_amplitude_direct,
)
from .lattice import (
    ED_MAX_SITES,
    EdGroundState,
    IsingChain,
    all_spin_configurations,
    apply_ising_hamiltonian,
    ed_ground_state,
    ed_z_magnetization,
    ed_zz_connected_correlator,
    exact_ising_energy_density,
    exact_ising_ground_energy,
)
from .optimize import (
    MPS_CHI_CHOICES,
    PENALTY_ENERGY,
    URBM_LAYER_CHOICES,
    NonFiniteObjectiveError,
    OptimizationResult,
    OptimizerConfig,
    SimplexSettings,
    build_mps_reference,
    default_descent_stages,
    embed_mps_params,
    mps_delta_curve,
    nelder_mead,
    optimize_mps_chain,
    optimize_uniform_mps,
    optimize_uniform_mps_starts,
    optimize_urbm,
    optimize_urbm_starts,
    random_orthogonal,
    relative_energy_error,
    scan_urbm_lambda,
    subspace_rotation_minimize,
    urbm_delta_curve,
)
from .scaling import (
    DEFAULT_ACCURACY_GOAL,
    DegenerateFitError,
    DescriptivePowerResult,
    NoCrossingError,
    NStarEstimate,
    PowerLawFit,
    extract_nstar,
    fit_descriptive_exponent,
    fit_power_law,
)
from .transfer import (
    MAX_TRANSFER_CHI,
    DegenerateEvaluationError,
    SiteTensor,
    UniformRingMps,
    comps_amplitude,
    comps_log_amplitude,
    connected_zz_correlator,
    energy_density,
    magnetization,
    scaled_matrix_power,
    transfer_operator,
)

try:
    __version__ = _version("comps")
except PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = [
    "ED_MAX_SITES",
    "MAX_TRANSFER_CHI",
    "MPS_CHI_CHOICES",
    "PENALTY_ENERGY",
    "RBM_MAX_HIDDEN_DENSE",
    "RBM_MAX_HIDDEN_DIAGONAL",
    "URBM_LAYER_CHOICES",
    "URBM_MAX_DIRECT_BITS",
    "DEFAULT_ACCURACY_GOAL",
    "CopepsBlock",
    "DegenerateEvaluationError",
    "DegenerateFitError",
    "DescriptivePowerResult",
    "EdGroundState",
    "IsingChain",
    "NoCrossingError",
    "NonFiniteObjectiveError",
    "NStarEstimate",
    "OptimizationResult",
    "OptimizerConfig",
    "PowerLawFit",
    "RbmParameters",
    "SimplexSettings",
    "SiteTensor",
    "UniformRingMps",
    "Urbm2dParameters",
    "UrbmParameters",
    "all_spin_configurations",
    "apply_ising_hamiltonian",
    "build_copeps_block",
    "build_mps_reference",
    "build_rbm_sigma",
    "build_urbm_ab",
    "build_urbm_site_tensor",
    "comps_amplitude",
    "comps_log_amplitude",
    "connected_zz_correlator",
    "copeps_amplitude_torus",
    "copeps_hidden_factor",
    "copeps_visible_factor",
    "default_descent_stages",
    "ed_ground_state",
    "ed_z_magnetization",
    "ed_zz_connected_correlator",
    "embed_mps_params",
    "energy_density",
    "exact_ising_energy_density",
    "exact_ising_ground_energy",
    "extract_nstar",
    "fit_descriptive_exponent",
    "fit_power_law",
    "hidden_spin_table",
    "magnetization",
    "mps_delta_curve",
    "nelder_mead",
    "optimize_mps_chain",
    "optimize_uniform_mps",
    "optimize_uniform_mps_starts",
    "optimize_urbm",
    "optimize_urbm_starts",
    "random_orthogonal",
    "random_rbm_parameters",
    "rbm_amplitude",
    "rbm_sigma_diagonals",
    "rbm_trace_amplitude",
    "relative_energy_error",
    "scaled_matrix_power",
    "scan_urbm_lambda",
    "subspace_rotation_minimize",
    "transfer_operator",
    "urbm2d_amplitude_direct",
    "urbm_amplitude_direct",
    "urbm_delta_curve",
    "urbm_rung_matrix",
    "urbm_site_tensors",
]
