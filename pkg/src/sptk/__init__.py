"""Singular-perturbation toolkit for coupled fast/slow linear systems."""
from .certificate import (
    Certificate,
    default_Q2,
    dissipation_margin,
    epsilon_star,
    forwarding_functional,
    sandwich_bounds,
    synthesize_certificate,
    synthesize_fast_certificate,
    synthesize_slow_certificate,
)
from .decomposition import (
    Decomposition,
    boundary_layer_trajectory,
    decompose,
    reduced_trajectory,
)
from .errors import (
    AssumptionError,
    ConfigError,
    DimensionError,
    NotHurwitzError,
    SingularMatrixError,
    SptkError,
    ThresholdError,
)
from .model import (
    CoupledSystem,
    build_from_matrices,
    build_heat1d,
    build_scalar_exemplar,
    full_generator,
)
from .numerics import (
    LyapunovSolution,
    Trajectory,
    integrate_lti,
    operator_norm,
    solve_lyapunov,
    spectral_abscissa,
    sym_eig_extrema,
)
from .tikhonov import (
    GrowthBound,
    SweepResult,
    epsilon_sweep,
    error_trajectories,
    fixed_ic,
    perturbed_growth_bound,
    scaled_ic,
)

__version__ = "0.1.0"
