import logging
from typing import Optional, Tuple

import numpy as np

from jeq.errors import (
    ContinuityExhausted,
    LinearSolveFailure,
    PositivityLost,
    StepFailure,
    SubsolutionViolation,
)
from jeq.pointwise_algebra.j_operator_implementation import j_operator
from jeq.pointwise_algebra.relative_spectrum_implementation import batched_relative_spectrum
from jeq.pointwise_algebra.subsolution_check_implementation import subsolution_margin
from jeq.solver.evaluate_implementation import initial_state, worst_point
from jeq.solver.newton_step_implementation import newton_solve
from jeq.solver.solve_state_implementation import Problem, SolveConfig, SolveState
from jeq.torus_discretization.diagnostics_implementation import Diagnostics, diagnostics
from jeq.torus_discretization.grid_implementation import HermitianField, ScalarField
from jeq.torus_discretization.residual_field_implementation import gfrak_field

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 3
BOUNDARY_RTOL = 1e-12

LEG_FAILURES = (StepFailure, LinearSolveFailure, PositivityLost)


def _interior_index(mask: np.ndarray, k: int) -> Tuple[int, ...]:
    return tuple(int(i) for i in np.argwhere(mask)[k])


def check_subsolution(problem: Problem, usub: ScalarField, cfg: SolveConfig) -> float:
    """
    Checks that usub is a discrete subsolution matching the boundary data.

    At every interior point chi + Hess(usub) must be positive relative to g
    and sum 1/lambda_i <= (1 + subsolution_rtol) n/psi.

    Returns:
        The smallest relative margin (n/psi - sum 1/lambda_i) / (n/psi).

    Raises:
        SubsolutionViolation: Naming the first offending grid point.
    """
    grid = problem.grid
    boundary = grid.boundary_mask
    scale = max(1.0, float(np.max(np.abs(problem.phi.values[boundary]))))
    mismatch = np.abs(usub.values - problem.phi.values) > BOUNDARY_RTOL * scale
    mismatch &= boundary
    if np.any(mismatch):
        index = tuple(int(i) for i in np.argwhere(mismatch)[0])
        raise SubsolutionViolation(f"subsolution differs from the boundary data at {index}", index=index)

    gfrak, margin = gfrak_field(problem.chi, usub, problem.g)
    if margin <= 0:
        index = worst_point(problem, gfrak)
        raise SubsolutionViolation(f"chi + Hess(usub) is not positive at {index} (margin {margin:.3e})", index=index)

    mask = problem.equation_mask
    lam = batched_relative_spectrum(gfrak.values[mask], problem.g.values[mask])
    target = grid.n / problem.psi.values[mask]
    relative = subsolution_margin(lam, problem.psi.values[mask]) / target
    bad = np.flatnonzero(relative < -cfg.subsolution_rtol)
    if bad.size:
        index = _interior_index(mask, int(bad[0]))
        raise SubsolutionViolation(
            f"subsolution inequality fails at {index}: relative margin {float(relative[bad[0]]):.3e} "
            f"below -{cfg.subsolution_rtol:g}",
            index=index,
        )
    return float(np.min(relative))


def continuity_path(problem: Problem, usub: ScalarField, cfg: Optional[SolveConfig] = None) -> SolveState:
    """
    Solves the family psi_t = (1 - t) psi_0 + t psi from t = 0 to t = 1.

    psi_0 = n / tr(gfrak_usub^{-1} g) makes usub the exact solution at t = 0.
    The legs run over continuity_steps + 1 uniform values of t, each warm
    started from the previous solution; a failed leg is bisected, at most
    MAX_BISECTIONS times.

    Raises:
        PositivityLost: If usub is not admissible.
        ContinuityExhausted: If a leg still fails after the bisections.
    """
    cfg = cfg or SolveConfig()
    grid = problem.grid
    mask = problem.equation_mask
    gfrak, margin = gfrak_field(problem.chi, usub, problem.g)
    if margin <= 0:
        raise PositivityLost(f"continuity path needs an admissible subsolution (margin {margin:.3e})",
                             index=worst_point(problem, gfrak))
    psi = problem.psi.values
    psi0 = psi.copy()
    psi0[mask] = grid.n / j_operator(gfrak.values[mask], problem.g.values[mask])

    if np.max(np.abs(psi0 - psi)) <= 1e-14 * np.max(np.abs(psi)):
        ts = [1.0]
    else:
        ts = list(np.linspace(0.0, 1.0, cfg.continuity_steps + 1))

    def at(t: float) -> Problem:
        return problem.with_psi(ScalarField(grid, (1.0 - t) * psi0 + t * psi))

    def leg(t_a: float, state: SolveState, t_b: float, depth: int) -> SolveState:
        target = at(t_b)
        try:
            start = initial_state(target, state.u, history=state.step_history)
            before = start.iterations
            solved = newton_solve(target, start, cfg)
        except LEG_FAILURES as exc:
            if depth >= MAX_BISECTIONS:
                raise ContinuityExhausted(
                    f"leg t = {t_a:.6g} -> {t_b:.6g} failed after {MAX_BISECTIONS} bisections: {exc}",
                    history=state.step_history,
                ) from exc
            mid = 0.5 * (t_a + t_b)
            logger.warning("continuity leg t = %.6g -> %.6g failed (%s); bisecting at %.6g", t_a, t_b, exc, mid)
            halfway = leg(t_a, state, mid, depth + 1)
            return leg(mid, halfway, t_b, depth + 1)
        logger.info("continuity t = %.6g solved in %d steps", t_b, solved.iterations - before)
        return solved.model_copy(update={"path": state.path + [float(t_b)]})

    state = initial_state(at(0.0), usub)
    t_prev = 0.0
    for t in ts:
        state = leg(t_prev, state, float(t), 0)
        t_prev = float(t)
    return state


def solve_dirichlet(
    chi: HermitianField,
    g: HermitianField,
    psi: ScalarField,
    phi: ScalarField,
    usub: ScalarField,
    cfg: Optional[SolveConfig] = None,
    u0: Optional[ScalarField] = None,
) -> Tuple[SolveState, Diagnostics]:
    """
    Solves tr(gfrak_u^{-1} g) = n/psi at interior points of a box grid with u = phi on the faces.

    Newton starts from u0 (with its face values replaced by phi) or from usub.
    When it fails the solve is retried along continuity_path.

    Args:
        chi: Background form.
        g: Reference metric.
        psi: Positive right-hand side.
        phi: Boundary data; only its face values are used.
        usub: Discrete subsolution with usub = phi on the faces.
        cfg: Solver settings.
        u0: Optional starting potential.

    Returns:
        (state, diagnostics) with state.residual_norm <= cfg.newton_tol.

    Raises:
        SubsolutionViolation: If usub fails check_subsolution.
        ContinuityExhausted: If the fallback path fails.
        LinearSolveFailure: If a Krylov solve stagnates on the direct attempt.
    """
    cfg = cfg or SolveConfig()
    if np.any(psi.values <= 0):
        raise ValueError("psi must be positive")
    problem = Problem(chi, g, psi, phi)
    grid = problem.grid
    relative = check_subsolution(problem, usub, cfg)
    logger.info("dirichlet solve on %r: subsolution relative margin %.3e", grid, relative)

    start = usub
    if u0 is not None:
        values = u0.values.copy()
        values[grid.boundary_mask] = phi.values[grid.boundary_mask]
        start = ScalarField(grid, values)

    try:
        state = newton_solve(problem, initial_state(problem, start), cfg)
    except (StepFailure, PositivityLost) as exc:
        logger.warning("direct Newton failed (%s); falling back to the continuity path", exc)
        state = continuity_path(problem, usub, cfg)
    logger.info("dirichlet solve done: residual %.3e after %d steps", state.residual_norm, state.iterations)
    return state, diagnostics(state.u, chi, g, usub)
