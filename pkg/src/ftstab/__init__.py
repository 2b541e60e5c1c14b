"""Finite- and fixed-time stabilization of a controlled heat equation.

Spectral Dirichlet discretization, three feedback laws, a resolvent-based
time stepper that captures the origin exactly, and checks of the settling
bounds and Lyapunov inequalities.
"""

from .analysis import (
    InequalityReport,
    SettlingReport,
    arctan_estimate,
    check_differential_inequality,
    detect_settling,
    finite_time_bound,
    fixed_time_bound,
    inequality_parameters,
    lyapunov_series,
    nonlinear_fixed_time_bound,
)
from .errors import (
    ConfigurationError,
    DimensionError,
    FtstabError,
    GainError,
    ModelError,
    NumericalError,
    ProxConvergenceError,
)
from .feedback import (
    FiniteTimeLaw,
    FixedTimeLaw,
    NonlinearFixedTimeLaw,
    eval_control,
    eval_finite_time_control,
    eval_fixed_time_control,
    eval_nonlinear_control,
    gain_threshold,
    validate_gain,
)
from .integrator import ClosedLoop, SchemeConfig, Trajectory, run, step_explicit_regularized, step_prox_splitting
from .operators import (
    DiffusionOperator,
    InputOperator,
    apply_B,
    apply_Bstar,
    estimate_beta,
    make_coefficient,
    make_nonlinearity,
    make_perturbation,
    perturbation_bound,
    semigroup_step,
)
from .prox import prox_phi, prox_power_functional, prox_weighted_norm
from .scenarios import (
    ScenarioConfig,
    build_case1,
    build_case2,
    build_scenario,
    parse_config,
    run_scenario,
    sweep_initial_conditions,
    validate_scenario,
)
from .spectral import SpatialGrid, from_spectral, inner_product, l2_norm, to_spectral, weighted_norm

__version__ = "0.1.0"
