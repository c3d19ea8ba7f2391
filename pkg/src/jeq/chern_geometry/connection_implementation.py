import logging
from typing import Optional, Tuple

import numpy as np

from jeq.errors import InsufficientOrder, NonHermitian, NonPositiveMetric
from jeq.chern_geometry.taylor_jet_implementation import TaylorJet, inverse_matrix, stack_jets

logger = logging.getLogger(__name__)


class MetricJet:
    """
    Jets of the metric coefficients g_{i jbar} about a base point.

    Attributes:
        g: TaylorJet with batch shape (n, n); g[i, j] is g_{i jbar}.
        entry: Catalog name the metric came from, if any.
        base_point: Real 2n-vector (x_1..x_n, y_1..y_n) of the expansion point.
        congruence: Matrix A of the affine change z = p + A w applied to reach
            g(base) = I (identity when no normalization was applied).
    """

    def __init__(self, g: TaylorJet, entry: str = "custom", base_point=None, congruence=None):
        if g.shape != (g.n, g.n):
            raise ValueError(f"metric jet must have batch shape (n, n), got {g.shape}")
        self.g = g
        self.entry = entry
        self.base_point = np.zeros(2 * g.n) if base_point is None else np.asarray(base_point, dtype=float)
        self.congruence = np.eye(g.n, dtype=complex) if congruence is None else np.asarray(congruence)
        self._check_hermitian()

    @property
    def n(self) -> int:
        return self.g.n

    @property
    def order(self) -> int:
        return self.g.order

    def _check_hermitian(self) -> None:
        mirrored = self.g.transpose(1, 0).conj()
        scale = max(1.0, float(np.max(np.abs(self.g.coeffs))))
        if not np.allclose(self.g.coeffs, mirrored.coeffs, rtol=0.0, atol=1e-12 * scale):
            raise NonHermitian(f"metric jet '{self.entry}' is not Hermitian")


class ConnectionData:
    """
    Chern connection quantities at the base point.

    Attributes:
        Gamma: Gamma[k, i, j] = Gamma^k_{ij}.
        T: T[k, i, j] = T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}.
        R: R[i, j, k, l] = R_{i jbar k lbar}.
        ginv: ginv[p, q] = g^{p qbar}.
    """

    def __init__(self, Gamma: np.ndarray, T: np.ndarray, R: np.ndarray, ginv: np.ndarray):
        self.Gamma = Gamma
        self.T = T
        self.R = R
        self.ginv = ginv


def christoffel_jets(m: MetricJet) -> Tuple[TaylorJet, TaylorJet]:
    """
    Returns jets of (g^{k lbar}, Gamma^k_{ij}) indexed as ginv[k, l] and Gamma[k, i, j].

    Raises:
        NonPositiveMetric: If g is not positive definite at the base point.
        InsufficientOrder: If the metric jet has order < 1.
    """
    G = m.g
    if G.order < 1:
        raise InsufficientOrder(f"metric jet of order {G.order} cannot carry a connection")
    try:
        np.linalg.cholesky(G.value())
    except np.linalg.LinAlgError as exc:
        raise NonPositiveMetric(f"metric '{m.entry}' is not positive definite at the base point") from exc

    # (G^{-1})[l, k] = g^{k lbar}
    ginv = inverse_matrix(G).transpose(1, 0)
    dG = stack_jets([G.d(i) for i in range(m.n)])
    Gamma = ginv.contract("kl,ijl->kij", dG)
    return ginv, Gamma


def connection(m: MetricJet) -> ConnectionData:
    """
    Computes Christoffel symbols, torsion and curvature of the Chern connection.

    Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar}, T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji} and
    R_{i jbar k lbar} = -d_i dbar_j g_{k lbar} + g^{p qbar} d_i g_{k qbar} dbar_j g_{p lbar}.

    Args:
        m: Metric jet of order >= 2.

    Returns:
        ConnectionData evaluated at the base point.

    Raises:
        NonPositiveMetric: If g is not positive definite at the base point.
        InsufficientOrder: If the metric jet has order < 2.
    """
    if m.order < 2:
        raise InsufficientOrder(f"curvature needs a metric jet of order >= 2, got {m.order}")
    ginv, Gamma = christoffel_jets(m)
    G = m.g
    n = m.n
    T = Gamma - Gamma.transpose(0, 2, 1)

    dG = stack_jets([G.d(i) for i in range(n)])           # [i, k, q]
    dbarG = stack_jets([G.dbar(j) for j in range(n)])     # [j, p, l]
    ddbarG = stack_jets([stack_jets([G.d(i).dbar(j) for j in range(n)]) for i in range(n)])  # [i, j, k, l]
    mixed = dG.contract("ikq,pq->ikp", ginv).contract("ikp,jpl->ijkl", dbarG)
    R = mixed - ddbarG

    data = ConnectionData(Gamma=Gamma.value(), T=T.value(), R=R.value(), ginv=ginv.value())
    logger.debug("connection for %s: |T|max=%.3e |R|max=%.3e", m.entry, np.max(np.abs(data.T)), np.max(np.abs(data.R)))
    return data
