"""Numerical laboratory for N competing predator packs sharing one prey.

The reaction-diffusion system

    dw_i/dt = d*Lap(w_i) + (-omega + k*u - beta*sum_{j!=i} w_j) * w_i
    du/dt   = D*Lap(u)   + (lambda - mu*u - k*sum_i w_i) * u

on a box with no-flux boundaries has a unique constant coexistence state
whenever lambda*k > mu*omega.  This package computes that state and its
linearized spectrum in closed form, time-marches and Newton-solves the PDE
on cell-centered grids, classifies the (beta, N) parameter plane by whether
coexistence survives as a flat profile, and carries two self-contained
analysis tools: an integral identity for the reduced two-component system
and a pigeonhole lower bound for ball overlaps of point clouds.
"""

__version__ = "0.1.0"

from .model import (
    ConstantState,
    ModelParams,
    PopulationComparison,
    ReducedState,
    constant_coexistence_state,
    reaction_jacobian,
    reaction_terms,
    reduced_constant_states,
    reduced_reaction_terms,
    require_valid,
    total_population,
    validate_params,
)
from .stability import (
    Spectrum,
    StabilityLabel,
    StabilityVerdict,
    classify_constant_stability,
    classify_extinction_state,
    linearized_matrix,
    mode_block,
    mode_spectrum,
    spectrum_closed_form,
    spectrum_numeric,
)
from .grids import (
    Field,
    Grid,
    build_grid,
    implicit_diffusion_solver,
    laplacian_apply,
    laplacian_matrix,
    neumann_eigenvalues,
    neumann_eigenvector,
)
from .dynamics import (
    BlowUpError,
    Classification,
    EvolveReport,
    NewtonNoConvergence,
    SolutionLabel,
    classify_solution,
    evolve,
    newton_steady,
    ordering_rigidity_probe,
    reduced_newton_steady,
    reduced_steady_identity,
    residual_max,
    step_imex,
)
from .seeding import derive_seed
from .sweep import (
    SweepCell,
    SweepProtocol,
    SweepResult,
    ThresholdEstimate,
    eigen_perturbed_start,
    estimate_thresholds,
    monotonicity_anomalies,
    noise_start,
    run_sweep,
    to_csv,
    write_heatmap_svg,
)
from .covering import (
    PointCloud,
    covering_lower_bound,
    jung_radius,
    max_overlap,
)
from .config import (
    ConfigError,
    OutputSettings,
    RunConfig,
    SolverSettings,
    SweepSettings,
    load_config,
    parse_config,
    render_config,
)

__all__ = [
    "__version__",
    # model
    "ModelParams", "ConstantState", "ReducedState", "PopulationComparison",
    "validate_params", "require_valid", "reaction_terms", "reaction_jacobian",
    "constant_coexistence_state", "reduced_reaction_terms",
    "reduced_constant_states", "total_population",
    # stability
    "StabilityLabel", "Spectrum", "StabilityVerdict", "linearized_matrix",
    "spectrum_closed_form", "spectrum_numeric", "classify_constant_stability",
    "classify_extinction_state", "mode_block", "mode_spectrum",
    # grids
    "Grid", "Field", "build_grid", "laplacian_apply", "laplacian_matrix",
    "neumann_eigenvalues", "neumann_eigenvector", "implicit_diffusion_solver",
    # dynamics
    "BlowUpError", "NewtonNoConvergence", "SolutionLabel", "Classification",
    "EvolveReport", "step_imex", "evolve", "classify_solution", "residual_max",
    "newton_steady", "reduced_newton_steady", "reduced_steady_identity",
    "ordering_rigidity_probe",
    # seeding / sweep
    "derive_seed", "SweepProtocol", "SweepCell", "SweepResult",
    "ThresholdEstimate", "eigen_perturbed_start", "noise_start", "run_sweep",
    "to_csv", "estimate_thresholds", "monotonicity_anomalies",
    "write_heatmap_svg",
    # covering
    "PointCloud", "jung_radius", "covering_lower_bound", "max_overlap",
    # config
    "ConfigError", "RunConfig", "SolverSettings", "SweepSettings",
    "OutputSettings", "parse_config", "render_config", "load_config",
]
