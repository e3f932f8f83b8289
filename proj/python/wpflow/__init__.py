"""Constrained Willmore phase-field flow solver.

Thin python layer over the C++ core: grids, the double-well functionals,
the inverse Neumann Laplacian, constraint handling, the proximal stepper,
and the flow driver with its estimate checks.
"""

from ._core import (
    ConstraintSpec,
    DependenceReport,
    EstimateCheck,
    EstimateReport,
    Field,
    Grid,
    NeumannSolvePlan,
    PhaseState,
    PotentialParams,
    RunConfig,
    RunStatus,
    SolveMethod,
    SolverError,
    StepConfig,
    StepReport,
    StepStatus,
    Trajectory,
    W,
    W1,
    W2,
    W3,
    area_F,
    beta_alpha_estimate,
    check_estimates,
    chemical_potential,
    construct_feasible,
    continuous_dependence_harness,
    dirichlet_energy,
    dual_norm_sq,
    energy_E,
    evolve,
    grad_E,
    h1_norm_sq,
    h2_norm_sq,
    inner,
    integrate,
    laplacian,
    m_M_probe,
    make_state,
    mean,
    norm_l2,
    proximal_step,
    retract_to_manifold,
    solve_N,
    z_empty_sufficient,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
