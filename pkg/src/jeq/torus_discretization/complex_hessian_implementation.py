"""Second-order finite differences and the discrete complex Hessian.

Axis a < n is x_{a+1}, axis n + a is y_{a+1}. Periodic grids use centered
stencils with wrap-around. Box grids use the same centered stencils at interior
points and second-order one-sided formulas on the faces.
"""

import numpy as np

from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField


def first_derivative(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    h = grid.spacing[axis]
    if grid.periodic:
        return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * h)
    return np.gradient(values, h, axis=axis, edge_order=2)


def second_derivative(values: np.ndarray, grid: Grid, axis: int) -> np.ndarray:
    h = grid.spacing[axis]
    if grid.periodic:
        return (np.roll(values, -1, axis=axis) - 2.0 * values + np.roll(values, 1, axis=axis)) / h ** 2
    u = np.moveaxis(values, axis, 0)
    out = np.empty_like(u)
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h ** 2
    out[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h ** 2
    out[-1] = (2.0 * u[-1] - 5.0 * u[-2] + 4.0 * u[-3] - u[-4]) / h ** 2
    return np.moveaxis(out, 0, axis)


def real_second_derivatives(values: np.ndarray, grid: Grid) -> np.ndarray:
    """
    All second derivatives D_{ab} u as an array of shape grid.shape + (2n, 2n).

    D_{ab} is exactly symmetric: the mixed entries are computed once and mirrored.
    """
    m = grid.ndim
    first = [first_derivative(values, grid, a) for a in range(m)]
    D = np.empty(values.shape + (m, m), dtype=values.dtype)
    for a in range(m):
        D[..., a, a] = second_derivative(values, grid, a)
        for b in range(a + 1, m):
            D[..., a, b] = first_derivative(first[a], grid, b)
            D[..., b, a] = D[..., a, b]
    return D


def hessian_from_real(D: np.ndarray, n: int) -> np.ndarray:
    """
    u_{i jbar} = 1/4 [(D_{x_i x_j} + D_{y_i y_j}) + i (D_{x_i y_j} - D_{y_i x_j})].

    The result is Hermitian by construction and has a real diagonal.
    """
    xx = D[..., :n, :n]
    yy = D[..., n:, n:]
    xy = D[..., :n, n:]
    antisym = xy - np.swapaxes(xy, -1, -2)
    return 0.25 * ((xx + yy) + 1j * antisym)


def complex_hessian(u: ScalarField) -> HermitianField:
    """
    Discrete complex Hessian u_{i jbar} = d_i dbar_j u.

    Args:
        u: Finite scalar field.

    Returns:
        HermitianField of the same grid.

    Raises:
        ValueError: If u has non-finite values.
    """
    if not np.all(np.isfinite(u.values)):
        raise ValueError("complex_hessian needs a finite field")
    D = real_second_derivatives(u.values, u.grid)
    return HermitianField(u.grid, hessian_from_real(D, u.grid.n), check=False)


def complex_gradient(u: ScalarField) -> np.ndarray:
    """u_i = 1/2 (d/dx_i - i d/dy_i) u, shape grid.shape + (n,)."""
    n = u.grid.n
    dx = np.stack([first_derivative(u.values, u.grid, a) for a in range(n)], axis=-1)
    dy = np.stack([first_derivative(u.values, u.grid, n + a) for a in range(n)], axis=-1)
    return 0.5 * (dx - 1j * dy)


def real_operator_coefficients(F: np.ndarray) -> np.ndarray:
    """
    Real symmetric M with Re tr(F H(u)) = sum_ab M_ab D_ab u for Hermitian F.

    With F = P + iQ, M = 1/4 [[P, Q], [Q^T, P]].
    """
    P = np.real(F)
    Q = np.imag(F)
    top = np.concatenate([P, Q], axis=-1)
    bottom = np.concatenate([np.swapaxes(Q, -1, -2), P], axis=-1)
    return 0.25 * np.concatenate([top, bottom], axis=-2)


def apply_real_operator(M: np.ndarray, values: np.ndarray, grid: Grid) -> np.ndarray:
    """sum_ab M_ab D_ab u with the same stencils as complex_hessian."""
    D = real_second_derivatives(values, grid)
    return np.einsum("...ab,...ab->...", M, D)


def operator_diagonal(M: np.ndarray, grid: Grid) -> np.ndarray:
    """Center weight of the stencil of sum_ab M_ab D_ab; the mixed stencils have none."""
    weights = np.array([-2.0 / h ** 2 for h in grid.spacing])
    return np.einsum("...aa,a->...", M, weights)
