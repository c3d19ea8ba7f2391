"""Manufactured Dirichlet problems and the experiments built on them.

The exact solution on the unit box of C^2 is

    u* = A sin(2 pi x1) sin(2 pi x2) 16 y1 (1 - y1) y2 (1 - y2) + s (x1 x2 - y1 y2),

with g = I, chi = 2I and psi = n / tr((chi + Hess u*)^{-1}) from the exact
complex Hessian. The second term is pluriharmonic, so it changes the boundary
data without changing psi; the discrete Hessian annihilates it exactly.
"""

import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import sympy
from pydantic import BaseModel

from jeq.pointwise_algebra.j_operator_implementation import j_operator
from jeq.solver.derivative_diagnostic_implementation import derivative_diagnostic
from jeq.solver.solve_dirichlet_implementation import solve_dirichlet
from jeq.solver.solve_state_implementation import Problem, SolveConfig, SolveState
from jeq.torus_discretization.diagnostics_implementation import Diagnostics
from jeq.torus_discretization.expression_implementation import (
    coordinate_symbols,
    evaluate_scalar,
    exact_complex_hessian,
)
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField

logger = logging.getLogger(__name__)

# u* itself is a subsolution of the discrete problem only up to the stencil error
MANUFACTURED_RTOL = 0.25
DEFAULT_POINTS = (9, 17)
TREND_SCALES = (1.0, 2.0, 4.0, 8.0)
# boundary family coefficient of (x1 x2 - y1 y2) at scale 1
TREND_AMPLITUDE = 2.0


class ManufacturedProblem(NamedTuple):
    problem: Problem
    exact: ScalarField
    usub: ScalarField
    initial: ScalarField


def manufactured_expression(amplitude: float = 0.1, trend: float = 0.0) -> sympy.Expr:
    x1, x2, y1, y2 = coordinate_symbols(2)
    bump = 16 * y1 * (1 - y1) * y2 * (1 - y2)
    wave = sympy.sin(2 * sympy.pi * x1) * sympy.sin(2 * sympy.pi * x2)
    return amplitude * wave * bump + trend * (x1 * x2 - y1 * y2)


def manufactured_config(**overrides) -> SolveConfig:
    return SolveConfig(**{"subsolution_rtol": MANUFACTURED_RTOL, **overrides})


def manufactured_dirichlet(
    points: int = 9,
    amplitude: float = 0.1,
    trend: float = 0.0,
    perturbation: float = 0.02,
) -> ManufacturedProblem:
    """
    Builds the manufactured problem on a box grid with ``points`` per axis.

    The initial guess is u* plus perturbation * prod_a sin(pi x_a), which
    vanishes on the faces.
    """
    grid = Grid.uniform(2, points, "box")
    expr = manufactured_expression(amplitude, trend)
    exact = ScalarField(grid, evaluate_scalar(expr, grid))
    chi = HermitianField.identity(grid, 2.0)
    g = HermitianField.identity(grid)
    gfrak = chi.values + exact_complex_hessian(expr, grid)
    psi = ScalarField(grid, grid.n / j_operator(gfrak, g.values))

    bump = np.ones(grid.shape)
    for coordinate in grid.coordinates:
        bump = bump * np.sin(np.pi * coordinate)
    # sin(pi) is not exactly zero, so the faces are masked to keep u0 = phi there
    bump[grid.boundary_mask] = 0.0
    initial = ScalarField(grid, exact.values + perturbation * bump)
    return ManufacturedProblem(Problem(chi, g, psi, exact), exact, exact, initial)


def solve_manufactured(
    case: ManufacturedProblem,
    cfg: Optional[SolveConfig] = None,
) -> Tuple[SolveState, Diagnostics]:
    p = case.problem
    return solve_dirichlet(p.chi, p.g, p.psi, p.phi, case.usub, cfg or manufactured_config(), u0=case.initial)


class ConvergenceReport(BaseModel):
    """Errors of the manufactured solve at two or more resolutions."""
    points: List[int]
    spacing: List[float]
    sup_error: List[float]
    error_ratio: List[float]
    diagnostic_max: List[float]
    diagnostic_ratio: List[float]
    newton_steps: List[int]


def convergence_study(
    points: Sequence[int] = DEFAULT_POINTS,
    cfg: Optional[SolveConfig] = None,
    amplitude: float = 0.1,
) -> ConvergenceReport:
    """
    Solves the manufactured problem on successively finer box grids.

    error_ratio[i] = sup_error[i] / sup_error[i + 1], about 4 for halved
    spacing; diagnostic_ratio does the same for the derivative diagnostic.
    """
    cfg = cfg or manufactured_config()
    errors, diag_max, steps, spacing = [], [], [], []
    for s in points:
        case = manufactured_dirichlet(s, amplitude=amplitude)
        state, _ = solve_manufactured(case, cfg)
        p = case.problem
        errors.append(float(np.max(np.abs(state.u.values - case.exact.values))))
        diag_max.append(float(np.max(derivative_diagnostic(state, p.g, p.chi, p.psi).values)))
        steps.append(state.iterations)
        spacing.append(p.grid.spacing[0])
        logger.info("points %d: sup error %.3e, diagnostic %.3e, %d steps", s, errors[-1], diag_max[-1], steps[-1])
    return ConvergenceReport(
        points=list(points),
        spacing=spacing,
        sup_error=errors,
        error_ratio=[a / b for a, b in zip(errors, errors[1:])],
        diagnostic_max=diag_max,
        diagnostic_ratio=[a / b for a, b in zip(diag_max, diag_max[1:])],
        newton_steps=steps,
    )


class TrendPoint(BaseModel):
    scale: float
    grad_max: float
    boundary_grad_max: float
    lap_max: float
    boundary_lap_max: float
    c1: float
    c2: float


class TrendReport(BaseModel):
    """Gradient and Laplacian maxima against their boundary values across the boundary family."""
    points: int
    samples: List[TrendPoint]
    c1_spread: float
    c2_spread: float


def boundary_trend(
    scales: Sequence[float] = TREND_SCALES,
    points: int = 9,
    cfg: Optional[SolveConfig] = None,
) -> TrendReport:
    """
    Solves the manufactured family with boundary data u* + 2 s (x1 x2 - y1 y2).

    c1 = grad_max / (1 + boundary_grad_max) and c2 = lap_max / (1 + boundary_lap_max);
    the spreads are the largest factor by which either differs from its value
    at the first scale.
    """
    cfg = cfg or manufactured_config()
    samples = []
    for s in scales:
        case = manufactured_dirichlet(points, trend=TREND_AMPLITUDE * float(s))
        _, diag = solve_manufactured(case, cfg)
        samples.append(TrendPoint(
            scale=float(s),
            grad_max=diag.grad_max,
            boundary_grad_max=diag.boundary_grad_max,
            lap_max=diag.lap_max,
            boundary_lap_max=diag.boundary_lap_max,
            c1=diag.grad_max / (1.0 + diag.boundary_grad_max),
            c2=diag.lap_max / (1.0 + diag.boundary_lap_max),
        ))
        logger.info("scale %g: c1 %.4g c2 %.4g", s, samples[-1].c1, samples[-1].c2)

    def spread(values: List[float]) -> float:
        ratios = [v / values[0] for v in values]
        return max(max(ratios), 1.0 / min(ratios))

    return TrendReport(
        points=points,
        samples=samples,
        c1_spread=spread([p.c1 for p in samples]),
        c2_spread=spread([p.c2 for p in samples]),
    )
