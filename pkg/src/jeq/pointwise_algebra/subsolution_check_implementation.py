import numpy as np

from jeq.errors import NonAdmissible

# reciprocals of smaller values overflow the sums below
ADMISSIBLE_FLOOR = 1e-14


def _reciprocals(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= ADMISSIBLE_FLOOR):
        raise NonAdmissible(f"spectrum has a value <= {ADMISSIBLE_FLOOR:g}: min {float(np.min(lam)):.3e}")
    return 1.0 / lam


def subsolution_margin(lam, psi):
    """
    Returns n/psi - sum_i 1/lambda_i along the last axis.

    The subsolution inequality holds where the margin is >= 0.

    Raises:
        NonAdmissible: If some lambda_i <= 1e-14.
    """
    recip = _reciprocals(lam)
    n = recip.shape[-1]
    return n / np.asarray(psi, dtype=float) - np.sum(recip, axis=-1)


def cone_margin(lam, psi):
    """
    Returns min_k (n/psi - sum_{i != k} 1/lambda_i) along the last axis.

    The cone condition holds where the margin is strictly > 0.

    Raises:
        NonAdmissible: If some lambda_i <= 1e-14.
    """
    recip = _reciprocals(lam)
    n = recip.shape[-1]
    # zero one term at a time so every partial sum adds in the same order as the full sum
    keep = ~np.eye(n, dtype=bool)
    partial = np.sum(np.where(keep, recip[..., None, :], 0.0), axis=-1)
    return n / np.asarray(psi, dtype=float) - np.max(partial, axis=-1)


def subsolution_check(lam, psi: float) -> bool:
    """
    Tests sum_i 1/lambda_i <= n/psi for one spectrum (non-strict).

    Args:
        lam: Positive relative eigenvalues of chi + Hess(usub).
        psi: Positive right-hand side.

    Returns:
        True when the subsolution inequality holds.

    Raises:
        NonAdmissible: If some lambda_i <= 1e-14.
    """
    recip = _reciprocals(lam)
    return bool(np.sum(recip) <= recip.shape[-1] / psi)


def cone_check(lam, psi: float) -> bool:
    """
    Tests sum_{i != k} 1/lambda_i < n/psi for every k (strict).

    Implied by subsolution_check; strictly weaker, e.g. lambda = (0.9, 0.9)
    with psi = 1 passes here and fails the subsolution inequality.

    Raises:
        NonAdmissible: If some lambda_i <= 1e-14.
    """
    return bool(cone_margin(lam, psi) > 0)


def diagonal_reciprocal_sum(A) -> float:
    """
    Returns sum_i 1/A_ii for a positive definite A written in a frame where g = I.

    This never exceeds sum_i 1/lambda_i(A), so a diagonal check is a
    sufficient test for the subsolution inequality.
    """
    diag = np.real(np.diagonal(np.asarray(A), axis1=-2, axis2=-1))
    return np.sum(_reciprocals(diag), axis=-1)
