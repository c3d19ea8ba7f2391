from typing import Tuple

import numpy as np

from jeq.errors import PositivityLost
from jeq.pointwise_algebra.j_operator_implementation import j_operator
from jeq.pointwise_algebra.relative_spectrum_implementation import (
    batched_positivity_margin,
    relative_spectrum,
)
from jeq.torus_discretization.complex_hessian_implementation import complex_hessian
from jeq.torus_discretization.grid_implementation import HermitianField, ScalarField


def _same_grid(*fields) -> None:
    first = fields[0].grid
    for f in fields[1:]:
        if f.grid != first:
            raise ValueError(f"fields live on different grids: {first!r} vs {f.grid!r}")


def gfrak_field(chi: HermitianField, u: ScalarField, g: HermitianField = None) -> Tuple[HermitianField, float]:
    """
    Forms gfrak = chi + u_{i jbar} pointwise.

    Args:
        chi: The background form.
        u: The potential.
        g: Reference metric for the margin (identity when omitted).

    Returns:
        (gfrak, margin) where margin is the smallest eigenvalue of gfrak relative
        to g over the points where the equation is posed (interior points on box grids).
    """
    _same_grid(chi, u)
    values = chi.values + complex_hessian(u).values
    gfrak = HermitianField(u.grid, values, check=False)
    metric = np.eye(u.grid.n) if g is None else g.values
    margins = batched_positivity_margin(values, metric)
    margin = float(np.min(margins[u.grid.interior_mask]))
    return gfrak, margin


def residual_field(gfrak: HermitianField, g: HermitianField, psi: ScalarField) -> ScalarField:
    """
    Pointwise residual tr(gfrak^{-1} g) - n/psi.

    On box grids the residual is evaluated at interior points and set to 0 on
    the boundary, where Dirichlet data replaces the equation.

    Raises:
        PositivityLost: With the grid index of the worst point, if gfrak is not
            positive definite relative to g somewhere it is evaluated.
        ValueError: If psi is not positive.
    """
    _same_grid(gfrak, g, psi)
    grid = gfrak.grid
    if np.any(psi.values <= 0):
        raise ValueError("psi must be positive")
    if grid.periodic:
        return ScalarField(grid, j_operator(gfrak.values, g.values) - grid.n / psi.values)
    mask = grid.interior_mask
    out = np.zeros(grid.shape)
    try:
        out[mask] = j_operator(gfrak.values[mask], g.values[mask]) - grid.n / psi.values[mask]
    except PositivityLost as exc:
        # map the position among interior points back to the grid index
        if exc.index is not None:
            exc.index = tuple(int(i) for i in np.argwhere(mask)[exc.index[0]])
        raise
    return ScalarField(grid, out)


def donaldson_class_margin(chi: HermitianField, g: HermitianField, psi: float) -> float:
    """
    Smallest eigenvalue of n*mean(chi) - psi*mean(g) relative to mean(g).

    On a flat torus the grid averages represent the classes, so a non-positive
    value means no solution with constant psi exists.
    """
    _same_grid(chi, g)
    n = chi.grid.n
    gbar = np.mean(g.values, axis=tuple(range(chi.grid.ndim)))
    cbar = np.mean(chi.values, axis=tuple(range(chi.grid.ndim)))
    gbar = 0.5 * (gbar + np.conj(gbar.T))
    cbar = 0.5 * (cbar + np.conj(cbar.T))
    return float(relative_spectrum(n * cbar - psi * gbar, gbar)[-1])
