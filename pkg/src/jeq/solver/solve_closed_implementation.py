import logging
from typing import Optional, Tuple

import numpy as np

from jeq.errors import BoxGridUnsupported
from jeq.pointwise_algebra.j_operator_implementation import j_operator
from jeq.solver.evaluate_implementation import initial_state
from jeq.solver.newton_step_implementation import newton_solve
from jeq.solver.solve_state_implementation import Problem, SolveConfig, SolveState
from jeq.torus_discretization.diagnostics_implementation import Diagnostics, diagnostics, mean_zero
from jeq.torus_discretization.grid_implementation import HermitianField, ScalarField
from jeq.torus_discretization.residual_field_implementation import donaldson_class_margin, gfrak_field

logger = logging.getLogger(__name__)


def solve_closed(
    chi: HermitianField,
    g: HermitianField,
    cfg: Optional[SolveConfig] = None,
    u0: Optional[ScalarField] = None,
    usub: Optional[ScalarField] = None,
) -> Tuple[SolveState, Diagnostics]:
    """
    Solves tr(gfrak_u^{-1} g) = c on a periodic grid for mean-zero u and the constant c.

    Args:
        chi: Background form; chi + Hess(start) must be positive relative to g.
        g: Reference metric.
        cfg: Solver settings (defaults when omitted).
        u0: Starting potential; falls back to usub, then to 0.
        usub: Optional subsolution, used for the start and for diagnostics.

    Returns:
        (state, diagnostics) with state.residual_norm <= cfg.newton_tol.

    Raises:
        BoxGridUnsupported: On a box grid.
        PositivityLost: If the start is not admissible.
        StepFailure: If Newton does not converge.
        LinearSolveFailure: If a Krylov solve stagnates.
    """
    cfg = cfg or SolveConfig()
    if not chi.grid.periodic:
        raise BoxGridUnsupported("solve_closed needs a periodic grid; use solve_dirichlet on box grids")
    problem = Problem(chi, g)
    grid = problem.grid
    start = u0 if u0 is not None else usub if usub is not None else ScalarField.constant(grid, 0.0)
    start = mean_zero(start)

    # the grid average of tr(gfrak^{-1} g) makes the starting residual mean-zero
    gfrak, margin = gfrak_field(chi, start, g)
    if margin > 0:
        c = float(np.mean(j_operator(gfrak.values, g.values)))
    else:
        c = float(grid.n)
    state = initial_state(problem, start, c)

    class_margin = donaldson_class_margin(chi, g, grid.n / c)
    if class_margin <= 0:
        logger.warning("class of n chi - psi omega is not positive (margin %.3e) at psi = n/c", class_margin)
    logger.info("closed solve on %r: start residual %.3e, c = %.12g", grid, state.residual_norm, c)

    state = newton_solve(problem, state, cfg)
    logger.info("closed solve done in %d steps: c = %.12g", state.iterations, state.c)
    return state, diagnostics(state.u, chi, g, usub)
