from typing import Optional

import numpy as np

from jeq.pointwise_algebra.j_operator_implementation import linearized_coefficients
from jeq.solver.solve_state_implementation import SolveState
from jeq.torus_discretization.complex_hessian_implementation import first_derivative
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField
from jeq.torus_discretization.residual_field_implementation import gfrak_field

# centered differences of gfrak need its stencil values one layer further in
BOX_DEPTH = 2


def complex_derivative(values: np.ndarray, grid: Grid, k: int) -> np.ndarray:
    """d_k = 1/2 (d/dx_k - i d/dy_k), applied to every component of a field."""
    return 0.5 * (first_derivative(values, grid, k) - 1j * first_derivative(values, grid, grid.n + k))


def _trace_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...ji->...", A, B)


def derivative_diagnostic(
    state: SolveState,
    g: HermitianField,
    chi: HermitianField,
    psi: Optional[ScalarField] = None,
) -> ScalarField:
    """
    max_k |d_k tr(gfrak^{-1} g) - d_k(n/psi)| by the chain rule:

        d_k tr(gfrak^{-1} g) = -tr(F d_k gfrak) + tr(gfrak^{-1} d_k g),  F = gfrak^{-1} g gfrak^{-1},

    with d_k gfrak and d_k g taken by centered differences. On a solved state
    this is a discretization error of order h^2. Box grids report 0 within two
    points of a face. Closed problems (psi None) use the constant n/c.
    """
    grid = state.u.grid
    n = grid.n
    gfrak, _ = gfrak_field(chi, state.u, g)
    if psi is None:
        rhs = np.full(grid.shape, float(state.c))
    else:
        rhs = n / psi.values
    mask = grid.inner_mask(BOX_DEPTH)
    F = linearized_coefficients(gfrak.values[mask], g.values[mask])
    eye = np.broadcast_to(np.eye(n, dtype=np.complex128), F.shape)
    inv = np.linalg.solve(gfrak.values[mask], eye)

    worst = np.zeros(grid.shape)
    for k in range(n):
        d_gfrak = complex_derivative(gfrak.values, grid, k)[mask]
        d_g = complex_derivative(g.values, grid, k)[mask]
        d_rhs = complex_derivative(rhs, grid, k)[mask]
        value = np.abs(-_trace_product(F, d_gfrak) + _trace_product(inv, d_g) - d_rhs)
        worst[mask] = np.maximum(worst[mask], value)
    return ScalarField(grid, worst)
