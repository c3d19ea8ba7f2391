"""Catalog of test metrics and scalar functions as Taylor jets about a base point.

Every metric is written in coordinates z, then re-expressed in coordinates w
with z = p + A w. With ``normalize=True`` the matrix A is chosen from the
Cholesky factor of g(p) so that the metric is the identity at the base point;
A is recorded on the returned MetricJet.
"""

import logging
from typing import Callable, Dict, List, Tuple

import numpy as np

from jeq.errors import UnknownEntry
from jeq.chern_geometry.connection_implementation import MetricJet
from jeq.chern_geometry.taylor_jet_implementation import TaylorJet, stack_jets

logger = logging.getLogger(__name__)

JET_ORDER = 4
CATALOG_ENTRIES = ("flat", "conformal-exp", "kahler-potential", "perturbed-hermitian", "product")
POTENTIALS = ("fubini-study", "quartic", "exponential")
KAHLER_ENTRIES = ("flat", "kahler-potential", "product")


class Coordinates:
    """Jets of z_i, zbar_i, x_i and y_i in the normalized coordinates w."""

    def __init__(self, p: np.ndarray, A: np.ndarray, degree: int):
        n = len(p)
        self.n = n
        w = [TaylorJet.variable(k, n, degree) for k in range(n)]
        wbar = [TaylorJet.variable(n + k, n, degree) for k in range(n)]
        self.z = [sum((w[j] * A[i, j] for j in range(n)), TaylorJet.constant(p[i], n, degree)) for i in range(n)]
        self.zbar = [
            sum((wbar[j] * np.conj(A[i, j]) for j in range(n)), TaylorJet.constant(np.conj(p[i]), n, degree))
            for i in range(n)
        ]
        self.x = [(self.z[i] + self.zbar[i]) * 0.5 for i in range(n)]
        self.y = [(self.z[i] - self.zbar[i]) * (-0.5j) for i in range(n)]

    def norm_squared(self) -> TaylorJet:
        return sum((self.z[i] * self.zbar[i] for i in range(1, self.n)), self.z[0] * self.zbar[0])


# --- metrics given by their coefficient matrix ---

def _flat(c: Coordinates) -> TaylorJet:
    return TaylorJet.constant(np.eye(c.n), c.n, c.z[0].degree)


def _conformal_exp(c: Coordinates) -> TaylorJet:
    return c.norm_squared().exp() * np.eye(c.n)


def _perturbed_hermitian(c: Coordinates) -> TaylorJet:
    n = c.n
    # conformal factor depends on z_1 and z_2, so the form is not closed
    factor = (1.0 + 0.2 * c.z[0] * c.zbar[0]) * (1.0 + 0.2 * c.x[0].sin() * c.y[1].cos())
    w = [c.z[i] + 0.5 for i in range(n)]
    wbar = [c.zbar[i] + 0.5 for i in range(n)]
    rank_one = stack_jets([stack_jets([w[i] * wbar[j] for j in range(n)]) for i in range(n)])
    return factor * np.eye(n) + rank_one * 0.1


def _product(c: Coordinates) -> TaylorJet:
    n = c.n
    diagonal = []
    for k in range(n):
        # h_k depends on z_k only
        h = 1.0 + c.z[k] * c.zbar[k] + 0.15 * (c.z[k] * c.z[k] + c.zbar[k] * c.zbar[k])
        diagonal.append(h * (k + 1.0) / n + (1.0 - (k + 1.0) / n) * h * h)
    zero = diagonal[0] * 0.0
    return stack_jets([stack_jets([diagonal[i] if i == j else zero for j in range(n)]) for i in range(n)])


# --- Kahler potentials ---

def _fubini_study(c: Coordinates) -> TaylorJet:
    return (1.0 + c.norm_squared()).log()


def _quartic_potential(c: Coordinates) -> TaylorJet:
    s = c.norm_squared()
    return s + 0.15 * (c.z[0] * c.zbar[1] + c.z[1] * c.zbar[0]) + 0.25 * s * s


def _exponential_potential(c: Coordinates) -> TaylorJet:
    linear = sum((c.x[i] * (1.0 / (i + 1)) for i in range(1, c.n)), c.x[0])
    return c.norm_squared() + linear.exp()


METRICS: Dict[str, Callable[[Coordinates], TaylorJet]] = {
    "flat": _flat,
    "conformal-exp": _conformal_exp,
    "perturbed-hermitian": _perturbed_hermitian,
    "product": _product,
}

POTENTIAL_FUNCTIONS: Dict[str, Callable[[Coordinates], TaylorJet]] = {
    "fubini-study": _fubini_study,
    "quartic": _quartic_potential,
    "exponential": _exponential_potential,
}


# --- scalar functions ---

def _scalar_quadratic(c: Coordinates) -> TaylorJet:
    s = sum((c.z[i] * c.zbar[i] * float(i + 1) for i in range(1, c.n)), c.z[0] * c.zbar[0])
    return s + 0.5 * (c.z[0] * c.z[1] + c.zbar[0] * c.zbar[1])


def _scalar_quartic(c: Coordinates) -> TaylorJet:
    s = c.norm_squared()
    return s * s + 0.5 * (c.z[0] * c.z[0] * c.zbar[1] + c.zbar[0] * c.zbar[0] * c.z[1])


def _scalar_trig(c: Coordinates) -> TaylorJet:
    return c.x[0].sin() * c.y[1].cos() + c.x[1].cos()


def _scalar_exponential(c: Coordinates) -> TaylorJet:
    return (0.5 * c.x[0] - 0.3 * c.y[1]).exp()


def _scalar_cubic(c: Coordinates) -> TaylorJet:
    # Re(z_1^2 zbar_2)
    return 0.5 * (c.z[0] * c.z[0] * c.zbar[1] + c.zbar[0] * c.zbar[0] * c.z[1])


SCALARS: Dict[str, Callable[[Coordinates], TaylorJet]] = {
    "quadratic": _scalar_quadratic,
    "quartic": _scalar_quartic,
    "trig": _scalar_trig,
    "exponential": _scalar_exponential,
    "cubic": _scalar_cubic,
}


def _metric_in(entry: str, potential: str, p: np.ndarray, A: np.ndarray, order: int) -> TaylorJet:
    """Metric coefficients in the w coordinates for the affine map z = p + A w."""
    n = len(p)
    if entry == "kahler-potential":
        phi = POTENTIAL_FUNCTIONS[potential](Coordinates(p, A, order + 2))
        g = stack_jets([stack_jets([phi.d(a).dbar(b) for b in range(n)]) for a in range(n)])
        return g.restrict(order)
    G = METRICS[entry](Coordinates(p, A, order))
    # g'_{a bbar} = sum_ij A_ia g_{i jbar} conj(A_jb)
    coeffs = np.einsum("ia,ijm,jb->abm", A, G.coeffs, np.conj(A))
    return TaylorJet(coeffs, n, G.degree, G.order)


def catalog(
    entry: str,
    base_point,
    normalize: bool = True,
    potential: str = "quartic",
    order: int = JET_ORDER,
) -> Tuple[MetricJet, Dict[str, TaylorJet]]:
    """
    Builds a catalog metric and the catalog scalars as jets about base_point.

    Args:
        entry: One of CATALOG_ENTRIES.
        base_point: Real 2n-vector (x_1..x_n, y_1..y_n), n >= 2.
        normalize: Apply the congruence that makes g(base) = I.
        potential: Potential used by the kahler-potential entry, one of POTENTIALS.
        order: Jet order.

    Returns:
        (MetricJet, {scalar name: TaylorJet}) in the same coordinates.

    Raises:
        UnknownEntry: If the entry or potential name is not in the catalog.
    """
    if entry not in CATALOG_ENTRIES:
        raise UnknownEntry(f"unknown catalog entry '{entry}'; choose from {', '.join(CATALOG_ENTRIES)}")
    if entry == "kahler-potential" and potential not in POTENTIALS:
        raise UnknownEntry(f"unknown potential '{potential}'; choose from {', '.join(POTENTIALS)}")
    base_point = np.asarray(base_point, dtype=float)
    if base_point.ndim != 1 or len(base_point) % 2 or len(base_point) < 4:
        raise ValueError(f"base point must be a real 2n-vector with n >= 2, got shape {base_point.shape}")
    n = len(base_point) // 2
    p = base_point[:n] + 1j * base_point[n:]

    A = np.eye(n, dtype=complex)
    g = _metric_in(entry, potential, p, A, order)
    if normalize:
        L = np.linalg.cholesky(g.value())
        A = np.linalg.inv(L).T
        g = _metric_in(entry, potential, p, A, order)

    coords = Coordinates(p, A, order)
    scalars = {name: build(coords) for name, build in SCALARS.items()}
    label = f"{entry}:{potential}" if entry == "kahler-potential" else entry
    logger.debug("catalog %s at %s", label, base_point)
    return MetricJet(g, entry=label, base_point=base_point, congruence=A), scalars
