from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from jeq.errors import BoxGridUnsupported
from jeq.torus_discretization.complex_hessian_implementation import (
    apply_real_operator,
    complex_gradient,
    real_operator_coefficients,
)
from jeq.torus_discretization.grid_implementation import HermitianField, ScalarField


class Diagnostics(BaseModel):
    """
    Scalar summaries of a potential u.

    Attributes:
        osc: max u - min u.
        grad_max: max of |grad u|^2 = g^{i jbar} u_i u_jbar.
        lap_max: max |Delta u| with Delta u = g^{i jbar} u_{i jbar}.
        W_max: max of W = tr_g chi + Delta u.
        W_field: W at every point (not serialized).
        boundary_grad_max, boundary_lap_max: the same maxima over the boundary (box grids).
        sup_u_minus_usub: max(u - usub), the shift used by the second-order test function.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    osc: float
    grad_max: float
    lap_max: float
    W_max: float
    W_field: Any = None
    boundary_grad_max: Optional[float] = None
    boundary_lap_max: Optional[float] = None
    sup_u_minus_usub: Optional[float] = None

    def report(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"W_field"})


def metric_inverse(g: HermitianField) -> np.ndarray:
    n = g.grid.n
    return np.linalg.solve(g.values, np.broadcast_to(np.eye(n, dtype=np.complex128), g.values.shape))


def gradient_squared(u: ScalarField, g: HermitianField) -> np.ndarray:
    """|grad u|^2 = g^{i jbar} u_i conj(u_j) with g^{i jbar} = (G^{-1})[j, i]."""
    du = complex_gradient(u)
    return np.real(np.einsum("...ji,...i,...j->...", metric_inverse(g), du, np.conj(du)))


def chern_laplacian(u: ScalarField, g: HermitianField) -> np.ndarray:
    """Delta u = g^{i jbar} u_{i jbar}, applied as a real second-order stencil."""
    M = real_operator_coefficients(metric_inverse(g))
    return apply_real_operator(M, u.values, u.grid)


def diagnostics(u: ScalarField, chi: HermitianField, g: HermitianField, usub: ScalarField = None) -> Diagnostics:
    """
    Computes oscillation, gradient and Laplacian maxima and the field W = tr_g chi + Delta u.

    Reductions run over whole numpy arrays, so repeated calls are bit-identical.
    """
    grid = u.grid
    grad2 = gradient_squared(u, g)
    lap = chern_laplacian(u, g)
    W = np.real(np.trace(np.linalg.solve(g.values, chi.values), axis1=-2, axis2=-1)) + lap
    result = Diagnostics(
        osc=float(np.max(u.values) - np.min(u.values)),
        grad_max=float(np.max(grad2)),
        lap_max=float(np.max(np.abs(lap))),
        W_max=float(np.max(W)),
        W_field=ScalarField(grid, W),
    )
    if not grid.periodic:
        boundary = grid.boundary_mask
        result.boundary_grad_max = float(np.max(grad2[boundary]))
        result.boundary_lap_max = float(np.max(np.abs(lap[boundary])))
    if usub is not None:
        result.sup_u_minus_usub = float(np.max(u.values - usub.values))
    return result


def mean_zero(u: ScalarField) -> ScalarField:
    """
    Subtracts the grid average.

    Raises:
        BoxGridUnsupported: On box grids, where the constant is fixed by the boundary data.
    """
    if not u.grid.periodic:
        raise BoxGridUnsupported("mean_zero is only defined on periodic grids")
    return ScalarField(u.grid, u.values - np.mean(u.values))
