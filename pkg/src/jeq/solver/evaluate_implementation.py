from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from jeq.errors import PositivityLost
from jeq.pointwise_algebra.relative_spectrum_implementation import batched_positivity_margin
from jeq.solver.solve_state_implementation import Problem, SolveState, StepRecord
from jeq.torus_discretization.grid_implementation import HermitianField, ScalarField
from jeq.torus_discretization.residual_field_implementation import gfrak_field, residual_field


class Evaluation(NamedTuple):
    gfrak: HermitianField
    margin: float
    residual: Optional[ScalarField]
    residual_norm: float


def evaluate(problem: Problem, u: ScalarField, c: Optional[float] = None) -> Evaluation:
    """
    Residual and positivity margin of a candidate iterate.

    An inadmissible candidate (margin <= 0, or c <= 0 on closed grids) comes
    back with residual None and an infinite residual norm instead of raising,
    so the line search can shrink the step.
    """
    gfrak, margin = gfrak_field(problem.chi, u, problem.g)
    if margin <= 0 or (problem.closed and (c is None or c <= 0)):
        return Evaluation(gfrak, margin, None, float("inf"))
    residual = residual_field(gfrak, problem.g, problem.rhs(c))
    norm = float(np.max(np.abs(residual.values[problem.equation_mask])))
    return Evaluation(gfrak, margin, residual, norm)


def worst_point(problem: Problem, gfrak: HermitianField) -> Tuple[int, ...]:
    """Grid index of the smallest positivity margin among the equation points."""
    margins = batched_positivity_margin(gfrak.values, problem.g.values)
    margins = np.where(problem.equation_mask, margins, np.inf)
    return tuple(int(i) for i in np.unravel_index(int(np.argmin(margins)), margins.shape))


def initial_state(
    problem: Problem,
    u: ScalarField,
    c: Optional[float] = None,
    history: Optional[List[StepRecord]] = None,
) -> SolveState:
    """
    Wraps a starting potential as a SolveState.

    Raises:
        PositivityLost: With the grid index of the worst point, if u is not admissible.
    """
    result = evaluate(problem, u, c)
    if result.residual is None:
        raise PositivityLost(
            f"starting potential is not admissible (margin {result.margin:.3e})",
            index=worst_point(problem, result.gfrak),
        )
    return SolveState(
        u=u,
        c=c,
        residual_norm=result.residual_norm,
        positivity_margin=result.margin,
        step_history=list(history or []),
    )
