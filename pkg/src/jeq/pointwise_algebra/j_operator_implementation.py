import numpy as np

from jeq.errors import PositivityLost
from jeq.pointwise_algebra.relative_spectrum_implementation import batched_positivity_margin


def _require_positive(gfrak: np.ndarray, g: np.ndarray) -> None:
    margin = batched_positivity_margin(gfrak, g)
    if np.any(margin <= 0):
        flat = int(np.argmin(margin))
        index = tuple(int(i) for i in np.unravel_index(flat, margin.shape)) if margin.ndim else None
        raise PositivityLost(
            f"gfrak is not positive definite relative to g (margin {float(np.min(margin)):.3e})",
            index=index,
        )


def j_operator(gfrak, g):
    """
    Evaluates tr(gfrak^{-1} g), the sum of reciprocal relative eigenvalues.

    Works on a single pair or on stacks of shape (..., n, n).

    Args:
        gfrak: Hermitian form, positive definite relative to g.
        g: Positive definite reference metric.

    Returns:
        A float for a single pair, otherwise an array of the batch shape.

    Raises:
        PositivityLost: If gfrak is not positive definite relative to g; the
            exception carries the batch index of the worst point.
    """
    gfrak = np.asarray(gfrak, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    _require_positive(gfrak, g)
    gfrak, g = np.broadcast_arrays(gfrak, g)
    value = np.real(np.trace(np.linalg.solve(gfrak, g), axis1=-2, axis2=-1))
    return float(value) if np.ndim(value) == 0 else value


def linearized_coefficients(gfrak, g) -> np.ndarray:
    """
    Returns F = gfrak^{-1} g gfrak^{-1}, the coefficients of the linearized
    operator: d/dt tr((gfrak + tH)^{-1} g) at t = 0 equals -tr(F H).

    Raises:
        PositivityLost: If gfrak is not positive definite relative to g.
    """
    gfrak = np.asarray(gfrak, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    _require_positive(gfrak, g)
    gfrak, g = np.broadcast_arrays(gfrak, g)
    n = gfrak.shape[-1]
    inv = np.linalg.solve(gfrak, np.broadcast_to(np.eye(n, dtype=np.complex128), gfrak.shape))
    F = inv @ g @ inv
    return 0.5 * (F + np.conj(np.swapaxes(F, -1, -2)))
