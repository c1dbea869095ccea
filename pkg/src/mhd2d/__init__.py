"""Pseudospectral tools for 2D incompressible MHD near a uniform magnetic field.

The state (u, v, b, B) is the perturbation of velocity and magnetic field
around the steady solution (velocity 0, field e1) on a periodic box.  The
linear part diagonalizes per Fourier mode into 2x2 blocks whose exponential
is evaluated in closed form; the nonlinear terms are handled pseudospectrally
with 2/3 dealiasing and an exponential Heun step.
"""

from .analysis import (
    NORM_NAMES,
    DecayFit,
    NormReport,
    compute_norms,
    fit_decay,
    theoretical_exponents,
    validity_window,
)
from .errors import (
    BadCutoffs,
    BadRegion,
    ConfigError,
    EmptySweep,
    ForcingInconsistency,
    GridMismatch,
    MHD2DError,
    NegativeTime,
    NonFiniteState,
    NonFiniteSymbol,
    NonPositiveValue,
    RegionMismatch,
    StepTooLarge,
    TimeNotSampled,
    TooFewSamples,
    WindowTooSmall,
)
from .fieldio import export_trajectory, read_field, write_field
from .initial import (
    DEFAULT_PHI_COMPONENTS,
    DEFAULT_PSI_COMPONENTS,
    gaussian_state,
    random_band_state,
    state_from_streams,
)
from .nonlinear import (
    Forcing,
    Trajectory,
    dt_max,
    duhamel_reconstruct,
    energy_balance,
    forcings,
    modified_energy,
    pressure,
    run,
    step,
)
from .propagator import (
    COMPLEX_BRANCH,
    DEGENERATE,
    REAL_BRANCH,
    apply_semigroup,
    eigenvalues,
    identity_residuals,
    matrix_exponential_oracle,
    multiplier_meshes,
    multipliers,
)
from .regions import (
    REGION_NAMES,
    BoundReport,
    classify,
    envelope,
    heat_region_decay,
    region_mask,
    region_name,
    standard_times,
    verify_bounds,
)
from .spectral import (
    Grid2D,
    PhysicalField,
    SpectralField,
    StateSpectral,
    apply_symbol,
    dealiased_product,
    forward_transform,
    get_fft_threads,
    inverse_transform,
    leray_project,
    lp_project,
    set_fft_threads,
    sym_dx,
    sym_dy,
    sym_inv_laplacian,
    time_band_project,
)
from .verification import (
    check_bounds,
    check_duhamel,
    check_energy,
    check_identities,
    check_multipliers,
)

__version__ = "0.1.0"

__all__ = [
    "BadCutoffs",
    "BadRegion",
    "BoundReport",
    "COMPLEX_BRANCH",
    "ConfigError",
    "DEFAULT_PHI_COMPONENTS",
    "DEFAULT_PSI_COMPONENTS",
    "DEGENERATE",
    "DecayFit",
    "EmptySweep",
    "Forcing",
    "ForcingInconsistency",
    "Grid2D",
    "GridMismatch",
    "MHD2DError",
    "NORM_NAMES",
    "NegativeTime",
    "NonFiniteState",
    "NonFiniteSymbol",
    "NonPositiveValue",
    "NormReport",
    "PhysicalField",
    "REAL_BRANCH",
    "REGION_NAMES",
    "RegionMismatch",
    "SpectralField",
    "StateSpectral",
    "StepTooLarge",
    "TimeNotSampled",
    "TooFewSamples",
    "Trajectory",
    "WindowTooSmall",
    "apply_semigroup",
    "apply_symbol",
    "check_bounds",
    "check_duhamel",
    "check_energy",
    "check_identities",
    "check_multipliers",
    "classify",
    "compute_norms",
    "dealiased_product",
    "dt_max",
    "duhamel_reconstruct",
    "eigenvalues",
    "energy_balance",
    "envelope",
    "export_trajectory",
    "fit_decay",
    "forcings",
    "forward_transform",
    "gaussian_state",
    "get_fft_threads",
    "heat_region_decay",
    "identity_residuals",
    "inverse_transform",
    "leray_project",
    "lp_project",
    "matrix_exponential_oracle",
    "modified_energy",
    "multiplier_meshes",
    "multipliers",
    "pressure",
    "random_band_state",
    "read_field",
    "region_mask",
    "region_name",
    "run",
    "set_fft_threads",
    "standard_times",
    "state_from_streams",
    "step",
    "sym_dx",
    "sym_dy",
    "sym_inv_laplacian",
    "theoretical_exponents",
    "time_band_project",
    "verify_bounds",
    "write_field",
]
