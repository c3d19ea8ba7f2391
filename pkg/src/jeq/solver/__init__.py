"""Damped Newton solves of the discrete J-equation, the continuity fallback and the estimate monitor."""

from jeq.solver.solve_state_implementation import (
    EstimateReport,
    Problem,
    SolveConfig,
    SolveState,
    StepRecord,
)
from jeq.solver.evaluate_implementation import Evaluation, evaluate, initial_state
from jeq.solver.linearize_and_solve_implementation import (
    NewtonDirection,
    jacobian_consistency,
    linearize_and_solve,
    solve_linearized,
)
from jeq.solver.newton_step_implementation import newton_solve, newton_step
from jeq.solver.solve_closed_implementation import solve_closed
from jeq.solver.solve_dirichlet_implementation import check_subsolution, continuity_path, solve_dirichlet
from jeq.solver.derivative_diagnostic_implementation import derivative_diagnostic
from jeq.solver.estimate_monitor_implementation import estimate_monitor
from jeq.solver.manufactured_implementation import (
    ConvergenceReport,
    ManufacturedProblem,
    TrendReport,
    boundary_trend,
    convergence_study,
    manufactured_config,
    manufactured_dirichlet,
    solve_manufactured,
)
