import logging

import numpy as np
import scipy.linalg

from jeq.errors import NonHermitian, NonPositiveMetric

logger = logging.getLogger(__name__)

HERMITIAN_ATOL = 1e-12


def as_hermitian(a, name: str = "matrix") -> np.ndarray:
    """
    Validates a (batch of) Hermitian matrices and returns it as complex128.

    Args:
        a: Array-like of shape (..., n, n).
        name: Label used in error messages.

    Returns:
        The input as a complex numpy array.

    Raises:
        ValueError: If the trailing axes are not square or n < 2.
        NonHermitian: If the matrix differs from its conjugate transpose.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise ValueError(f"{name} must have square trailing axes, got shape {arr.shape}")
    if arr.shape[-1] < 2:
        raise ValueError(f"{name} must have dimension n >= 2, got {arr.shape[-1]}")
    scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
    if not np.allclose(arr, np.conj(np.swapaxes(arr, -1, -2)), rtol=0.0, atol=HERMITIAN_ATOL * scale):
        raise NonHermitian(f"{name} is not Hermitian")
    return arr


def sort_descending(values: np.ndarray) -> np.ndarray:
    """Sorts along the last axis, largest first; ties keep their original order."""
    order = np.argsort(-values, axis=-1, kind="stable")
    return np.take_along_axis(values, order, axis=-1)


def relative_spectrum(A, g) -> np.ndarray:
    """
    Computes the eigenvalues of the Hermitian pair (A, g), i.e. the roots of
    det(A - lambda g) = 0, for a positive definite g.

    The pair is reduced with the Cholesky factor of g, so the result is
    invariant under the congruence A -> S^H A S, g -> S^H g S.

    Args:
        A: Hermitian n x n matrix.
        g: Positive definite Hermitian n x n matrix.

    Returns:
        A real n-vector sorted in descending order.

    Raises:
        NonPositiveMetric: If g is not positive definite.
        NonHermitian: If either input is not Hermitian.
    """
    A = as_hermitian(A, "A")
    g = as_hermitian(g, "g")
    if A.ndim != 2 or A.shape != g.shape:
        raise ValueError(f"expected two n x n matrices, got {A.shape} and {g.shape}")
    try:
        scipy.linalg.cholesky(g, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NonPositiveMetric("g is not positive definite") from exc
    values = scipy.linalg.eigh(A, g, eigvals_only=True)
    return sort_descending(np.asarray(values, dtype=float))


def batched_relative_spectrum(A, g) -> np.ndarray:
    """
    Vectorized relative spectrum over leading batch axes.

    Args:
        A: Hermitian matrices of shape (..., n, n).
        g: Positive definite matrices, broadcastable against A.

    Returns:
        Real array of shape (..., n), each row sorted descending.

    Raises:
        NonPositiveMetric: If some g in the batch is not positive definite.
    """
    A = np.asarray(A, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    A, g = np.broadcast_arrays(A, g)
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise NonPositiveMetric("g is not positive definite at some point") from exc
    n = A.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=np.complex128), L.shape)
    L_inv = np.linalg.solve(L, eye)
    reduced = L_inv @ A @ np.conj(np.swapaxes(L_inv, -1, -2))
    reduced = 0.5 * (reduced + np.conj(np.swapaxes(reduced, -1, -2)))
    return sort_descending(np.linalg.eigvalsh(reduced))


def positivity_margin(A, g) -> float:
    """
    Returns the smallest eigenvalue of A relative to g.

    A is admissible (positive definite relative to g) iff the result is > 0.

    Raises:
        NonPositiveMetric: If g is not positive definite.
    """
    return float(relative_spectrum(A, g)[-1])


def batched_positivity_margin(A, g) -> np.ndarray:
    """Pointwise smallest relative eigenvalue over leading batch axes."""
    return batched_relative_spectrum(A, g)[..., -1]
