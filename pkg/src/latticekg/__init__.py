"""Spectral simulation laboratory for the nonlinear Klein-Gordon equation
on periodic lattices: discrete operators, lattice Fourier analysis,
continuous/discrete transfer operators, exact-linear-flow time integration,
dispersive decay measurements, and reproducible convergence studies.
"""

__version__ = "0.1.0"

from .grids import GridSpec, LatticeField, SpectralField
from .operators import (
    centered_gradient,
    discrete_laplacian,
    forward_gradient,
    lebesgue_norm,
    power_nonlinearity,
)
from .spectral import (
    LPCutoffs,
    apply_multiplier,
    dft,
    idft,
    kg_multiplier,
    lattice_symbol,
    littlewood_paley_project,
    sobolev_norm,
)
from .transfer import (
    ContinuousFunction,
    aliasing_defect,
    continuous_sobolev_norm,
    hs_error,
    mean_project,
    projection_interpolation_residual,
    restrict_to_coarse,
    shannon_interpolate,
)
from .evolution import (
    InstabilityError,
    ModelParams,
    State,
    energy,
    evolve,
    linear_propagate,
    modified_energy,
    nonlinear_kick,
    pair_norm,
    second_time_derivative,
    strang_step,
)
from .dispersion import (
    DispersionSpec,
    PhaseSpec,
    RadialBump,
    PeriodicCubeWindow,
    conjecture_scan,
    fit_decay_exponent,
    kernel_decay_series,
    linear_kernel,
    oscillatory_integral,
    sup_over_velocities,
)
from .experiments import (
    InitialData,
    StudyConfig,
    conjecture_study,
    convergence_study,
    decay_study,
    default_config,
    growth_study,
    linear_flow_error_study,
    simulate_study,
    validate_config,
)
