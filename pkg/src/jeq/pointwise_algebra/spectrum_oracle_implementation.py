import numpy as np
from scipy.optimize import brentq

from jeq.errors import NonPositiveMetric


def characteristic_value(A: np.ndarray, g: np.ndarray, lam):
    """Evaluates det(A - lam g) / det(g), real for a Hermitian pair."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    pencil = A[None, :, :] - lam[:, None, None] * g[None, :, :]
    return np.real(np.linalg.det(pencil)) / np.real(np.linalg.det(g))


def oracle_relative_spectrum(A, g, initial_points: int = 2048, max_points: int = 1 << 17) -> np.ndarray:
    """
    Finds the roots of det(A - lambda g) by bracketing sign changes on a
    lambda grid and refining each bracket with Brent's method.

    This path never calls an eigensolver, so it serves as an independent
    check of relative_spectrum. Roots must be simple; the grid is refined
    until n sign changes are found.

    Args:
        A: Hermitian n x n matrix.
        g: Positive definite Hermitian n x n matrix.
        initial_points: Size of the first lambda grid.
        max_points: Largest grid tried before giving up.

    Returns:
        The n roots sorted descending.

    Raises:
        NonPositiveMetric: If g is not positive definite.
        RuntimeError: If n simple roots cannot be bracketed.
    """
    A = np.asarray(A, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    n = A.shape[0]
    if np.min(np.linalg.eigvalsh(g)) <= 0:
        raise NonPositiveMetric("g is not positive definite")

    # every root satisfies |lambda| <= ||g^{-1} A||_2 <= ||g^{-1}||_F ||A||_F
    radius = 1.05 * np.linalg.norm(np.linalg.inv(g)) * np.linalg.norm(A) + 1e-12

    points = initial_points
    while points <= max_points:
        grid = np.linspace(-radius, radius, points)
        values = characteristic_value(A, g, grid)
        roots = list(grid[values == 0.0])
        changes = np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
        if len(changes) + len(roots) >= n:
            f = lambda x: float(characteristic_value(A, g, x)[0])
            for k in changes:
                roots.append(brentq(f, grid[k], grid[k + 1], xtol=1e-14, rtol=1e-15, maxiter=200))
            return np.sort(np.asarray(roots[:n], dtype=float))[::-1]
        points *= 2
    raise RuntimeError(f"could not bracket {n} simple roots of det(A - lambda g)")
