"""Newton direction for the discrete J-equation.

The residual R(u) = tr(gfrak_u^{-1} g) - n/psi has derivative
dR(u) v = -Re tr(F H(v)) with F = gfrak^{-1} g gfrak^{-1} and H the same
complex Hessian stencil that builds gfrak. The direction solves dR v = -R with
restarted GMRES, matrix-free, preconditioned by the stencil's center weight.

Closed grids add the unknown constant: the system is
[[dR, -1], [mean, 0]] [v, dc] = [-R, 0], so v comes back mean-zero.
"""

import logging
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from jeq.errors import LinearSolveFailure, PositivityLost
from jeq.pointwise_algebra.j_operator_implementation import linearized_coefficients
from jeq.solver.evaluate_implementation import evaluate, worst_point
from jeq.solver.solve_state_implementation import Problem, SolveConfig, SolveState
from jeq.torus_discretization.complex_hessian_implementation import (
    apply_real_operator,
    operator_diagonal,
    real_operator_coefficients,
)
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField

logger = logging.getLogger(__name__)


class NewtonDirection(NamedTuple):
    v: ScalarField
    dc: Optional[float]
    krylov_iters: int


def jacobian_coefficients(gfrak: HermitianField, g: HermitianField) -> np.ndarray:
    """
    Real second-order coefficients M with dR v = -sum_ab M_ab D_ab v.

    Only the points where the equation is posed carry coefficients; box faces
    hold Dirichlet data and stay zero.
    """
    grid = gfrak.grid
    mask = grid.interior_mask
    F = np.zeros(gfrak.values.shape, dtype=np.complex128)
    F[mask] = linearized_coefficients(gfrak.values[mask], g.values[mask])
    return real_operator_coefficients(F)


def apply_jacobian(M: np.ndarray, values: np.ndarray, grid: Grid) -> np.ndarray:
    return -apply_real_operator(M, values, grid)


def solve_linearized(
    M: np.ndarray,
    residual: np.ndarray,
    grid: Grid,
    cfg: SolveConfig,
) -> NewtonDirection:
    """
    Solves dR v = -residual (closed grids: with the constant and mean constraint).

    Args:
        M: Coefficients from jacobian_coefficients.
        residual: Residual values of the grid shape (zero on box faces).
        grid: The grid.
        cfg: Krylov tolerance, restart length and iteration cap.

    Returns:
        NewtonDirection; dc is None on box grids.

    Raises:
        LinearSolveFailure: If GMRES stops before the relative tolerance, with
            the number of inner iterations spent.
    """
    shape = grid.shape
    center = -operator_diagonal(M, grid)

    if grid.periodic:
        size = grid.size
        scale = float(np.mean(center))

        def matvec(x):
            v = x[:size].reshape(shape)
            out = np.empty(size + 1)
            out[:size] = (apply_jacobian(M, v, grid) - x[size]).ravel()
            out[size] = scale * np.mean(v)
            return out

        rhs = np.concatenate([-residual.ravel(), [0.0]])
        weights = np.concatenate([center.ravel(), [scale]])
    else:
        mask = grid.interior_mask
        size = int(np.count_nonzero(mask))

        def matvec(x):
            v = np.zeros(shape)
            v[mask] = x
            return apply_jacobian(M, v, grid)[mask]

        rhs = -residual[mask]
        weights = center[mask]

    if not np.any(rhs):
        zero = ScalarField(grid, np.zeros(shape))
        return NewtonDirection(zero, 0.0 if grid.periodic else None, 0)

    n_unknowns = rhs.shape[0]
    A = LinearOperator(dtype=float, shape=(n_unknowns, n_unknowns), matvec=matvec)
    P = LinearOperator(dtype=float, shape=(n_unknowns, n_unknowns), matvec=lambda x: x / weights)

    iterations = [0]

    def count(_):
        iterations[0] += 1

    restart = min(cfg.krylov_restart, n_unknowns)
    x, info = gmres(
        A, rhs,
        rtol=cfg.krylov_tol,
        atol=0.0,
        restart=restart,
        maxiter=max(1, math.ceil(cfg.krylov_max_iters / restart)),
        M=P,
        callback=count,
        callback_type="pr_norm",
    )
    true_residual = float(np.linalg.norm(rhs - A.matvec(x)) / np.linalg.norm(rhs))
    logger.debug("gmres: %d iterations, info=%d, relative residual %.3e", iterations[0], info, true_residual)
    if info != 0:
        raise LinearSolveFailure(
            f"GMRES stopped after {iterations[0]} iterations at relative residual {true_residual:.3e} "
            f"(tolerance {cfg.krylov_tol:g}, info {info})",
            iterations=iterations[0],
        )

    if grid.periodic:
        return NewtonDirection(ScalarField(grid, x[:size].reshape(shape)), float(x[size]), iterations[0])
    v = np.zeros(shape)
    v[mask] = x
    return NewtonDirection(ScalarField(grid, v), None, iterations[0])


def linearize_and_solve(state: SolveState, problem: Problem, cfg: SolveConfig) -> NewtonDirection:
    """
    Newton direction at an admissible state.

    Raises:
        PositivityLost: If the state's margin is below cfg.positivity_floor.
        LinearSolveFailure: If the Krylov solve stagnates.
    """
    result = evaluate(problem, state.u, state.c)
    if result.residual is None or result.margin < cfg.positivity_floor:
        raise PositivityLost(
            f"cannot linearize at a state with margin {result.margin:.3e} < {cfg.positivity_floor:g}",
            index=worst_point(problem, result.gfrak),
        )
    M = jacobian_coefficients(result.gfrak, problem.g)
    return solve_linearized(M, result.residual.values, problem.grid, cfg)


def jacobian_consistency(state: SolveState, problem: Problem, v: ScalarField, t: float = 1e-6) -> float:
    """
    Relative sup-norm gap between (R(u + t v) - R(u)) / t and dR v.

    The constant c of a closed problem is held fixed. On box grids v should
    vanish on the faces.
    """
    base = evaluate(problem, state.u, state.c)
    moved = evaluate(problem, ScalarField(problem.grid, state.u.values + t * v.values), state.c)
    if base.residual is None or moved.residual is None:
        raise PositivityLost("jacobian check left the admissible set")
    mask = problem.equation_mask
    finite = (moved.residual.values - base.residual.values)[mask] / t
    applied = apply_jacobian(jacobian_coefficients(base.gfrak, problem.g), v.values, problem.grid)[mask]
    return float(np.max(np.abs(finite - applied)) / max(np.max(np.abs(applied)), 1e-300))
