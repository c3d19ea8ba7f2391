import logging

import numpy as np

from jeq.errors import StepFailure
from jeq.solver.evaluate_implementation import evaluate
from jeq.solver.linearize_and_solve_implementation import jacobian_consistency, linearize_and_solve
from jeq.solver.solve_state_implementation import Problem, SolveConfig, SolveState, StepRecord
from jeq.torus_discretization.grid_implementation import ScalarField

logger = logging.getLogger(__name__)

# iterates between Jacobian self-checks at DEBUG level
JACOBIAN_CHECK_EVERY = 10


def newton_step(state: SolveState, problem: Problem, cfg: SolveConfig) -> SolveState:
    """
    One damped Newton step with backtracking on the step length.

    Tries s = 1, armijo_factor, armijo_factor^2, ... down to min_step and
    accepts the first s whose iterate keeps the positivity margin at or above
    positivity_floor and lowers the residual sup norm. A state that is already
    within newton_tol accepts a step that does not raise the residual.

    Returns:
        The new state with the accepted step appended to its history.

    Raises:
        StepFailure: If no step length qualifies.
        LinearSolveFailure: If the Newton direction cannot be computed.
    """
    direction = linearize_and_solve(state, problem, cfg)
    grid = problem.grid
    step = 1.0
    while step >= cfg.min_step:
        values = state.u.values + step * direction.v.values
        c = None
        if problem.closed:
            values = values - np.mean(values)
            c = state.c + step * direction.dc
        trial_u = ScalarField(grid, values)
        trial = evaluate(problem, trial_u, c)
        # below newton_tol a step may keep the residual level but never raise it
        settled = state.residual_norm <= cfg.newton_tol and trial.residual_norm <= state.residual_norm
        if trial.margin >= cfg.positivity_floor and (trial.residual_norm < state.residual_norm or settled):
            record = StepRecord(
                iter=state.iterations + 1,
                residual=trial.residual_norm,
                step=step,
                margin=trial.margin,
                krylov_iters=direction.krylov_iters,
            )
            logger.info(
                "newton %d: residual %.3e step %.3g margin %.3e krylov %d",
                record.iter, record.residual, record.step, record.margin, record.krylov_iters,
            )
            return SolveState(
                u=trial_u,
                c=c,
                residual_norm=trial.residual_norm,
                positivity_margin=trial.margin,
                step_history=state.step_history + [record],
                path=state.path,
            )
        step *= cfg.armijo_factor
    logger.warning("line search failed: residual %.3e, no step >= %g qualifies", state.residual_norm, cfg.min_step)
    raise StepFailure(
        f"no step length >= {cfg.min_step:g} keeps margin >= {cfg.positivity_floor:g} "
        f"and lowers the residual {state.residual_norm:.3e}",
        history=state.step_history,
    )


def newton_solve(problem: Problem, state: SolveState, cfg: SolveConfig) -> SolveState:
    """
    Newton steps until the residual sup norm is within newton_tol.

    Raises:
        StepFailure: From the line search, or when max_newton_iters steps do
            not reach the tolerance.
    """
    for count in range(cfg.max_newton_iters + 1):
        if state.residual_norm <= cfg.newton_tol:
            logger.debug("converged after %d steps, residual %.3e", count, state.residual_norm)
            return state.model_copy(update={"converged": True})
        if count == cfg.max_newton_iters:
            break
        if count and count % JACOBIAN_CHECK_EVERY == 0 and logger.isEnabledFor(logging.DEBUG):
            direction = linearize_and_solve(state, problem, cfg)
            logger.debug("jacobian check: relative gap %.3e", jacobian_consistency(state, problem, direction.v))
        state = newton_step(state, problem, cfg)
    raise StepFailure(
        f"residual {state.residual_norm:.3e} above {cfg.newton_tol:g} after {cfg.max_newton_iters} Newton steps",
        history=state.step_history,
    )
