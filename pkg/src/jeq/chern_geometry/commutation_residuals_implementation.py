"""Residuals of the commutation formulas for covariant derivatives.

The suite checks, at the base point of each jet,

* torsion_commutator:  v_{i jbar k} - v_{k jbar i} = T^l_{ik} v_{l jbar}, together with
  v_{i jbar kbar} - v_{i kbar jbar} = conj(T^l_{jk}) v_{i lbar};
* curvature_commutator:  v_{i jbar k lbar} - v_{i jbar lbar k}
  = g^{p qbar} R_{k lbar i qbar} v_{p jbar} - g^{p qbar} R_{k lbar p jbar} v_{i qbar};
* four_index_swap:  v_{i jbar k lbar} - v_{k lbar i jbar}
  = g^{p qbar} (R_{k lbar i qbar} v_{p jbar} - R_{i jbar k qbar} v_{p lbar})
  + T^p_{ik} v_{p jbar lbar} + conj(T^q_{jl}) v_{i qbar k} - T^p_{ik} conj(T^q_{jl}) v_{p qbar}.

``curvature_index_gap`` measures how much g^{p qbar} R_{p lbar k jbar} v_{i qbar}
differs from the curvature term above; the two agree when R is symmetric in its
holomorphic slots, which holds for Kahler metrics but not in general.
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from jeq.chern_geometry.catalog_implementation import CATALOG_ENTRIES, catalog
from jeq.chern_geometry.connection_implementation import MetricJet, connection
from jeq.chern_geometry.covariant_derivatives_implementation import covariant_derivatives
from jeq.chern_geometry.taylor_jet_implementation import TaylorJet

logger = logging.getLogger(__name__)

IDENTITY_NAMES = ("torsion_commutator", "curvature_commutator", "four_index_swap")


class CommutationResiduals(BaseModel):
    """Maximum residual per identity: absolute and scaled by (1 + size of the terms)."""
    torsion_commutator: float
    curvature_commutator: float
    four_index_swap: float
    torsion_commutator_scaled: float
    curvature_commutator_scaled: float
    four_index_swap_scaled: float
    curvature_index_gap: float
    entry: Optional[str] = None
    scalar: Optional[str] = None

    def worst_scaled(self) -> float:
        return max(getattr(self, f"{name}_scaled") for name in IDENTITY_NAMES)


class IdentitySuiteReport(BaseModel):
    """Aggregate of the identity suite, as printed by the `identities` command."""
    n_values: List[int]
    entries: List[str]
    points: int
    evaluations: int
    max_residuals: Dict[str, float] = Field(default_factory=dict)
    max_scaled_residuals: Dict[str, float] = Field(default_factory=dict)
    max_curvature_index_gap: float = 0.0
    worst_case: Optional[CommutationResiduals] = None
    passed: bool = True


def _residual(lhs: np.ndarray, rhs: np.ndarray):
    diff = float(np.max(np.abs(lhs - rhs)))
    scale = 1.0 + max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return diff, diff / scale


def commutation_residuals(v: TaylorJet, m: MetricJet) -> CommutationResiduals:
    """
    Evaluates both sides of every commutation formula at the base point.

    Args:
        v: Real-valued scalar jet of order >= 4.
        m: Metric jet of order >= 3.

    Returns:
        CommutationResiduals with the max residual over all index tuples.
    """
    conn = connection(m)
    cov = covariant_derivatives(v, m)
    T, R, ginv = conn.T, conn.R, conn.ginv
    Tbar = np.conj(T)
    V2, V3, V3b, V4 = cov.v_ij, cov.v_ijk, cov.v_ijkbar, cov.v_ijkl
    V4s = np.transpose(cov.v_ijlk, (0, 1, 3, 2))  # now [i, j, k, l]

    # torsion
    lhs = V3 - np.transpose(V3, (2, 1, 0))
    rhs = np.einsum("lik,lj->ijk", T, V2)
    lhs_bar = V3b - np.transpose(V3b, (0, 2, 1))
    rhs_bar = np.einsum("ljk,il->ijk", Tbar, V2)
    t_abs, t_scaled = _residual(np.stack([lhs, lhs_bar]), np.stack([rhs, rhs_bar]))

    # curvature
    first = np.einsum("pq,kliq,pj->ijkl", ginv, R, V2)
    second = np.einsum("pq,klpj,iq->ijkl", ginv, R, V2)
    c_abs, c_scaled = _residual(V4 - V4s, first - second)
    printed_second = np.einsum("pq,plkj,iq->ijkl", ginv, R, V2)
    gap = float(np.max(np.abs(second - printed_second)))

    # swap of the (k, lbar) and (i, jbar) pairs
    lhs = V4 - np.transpose(V4, (2, 3, 0, 1))
    rhs = (
        first
        - np.einsum("pq,ijkq,pl->ijkl", ginv, R, V2)
        + np.einsum("pik,pjl->ijkl", T, V3b)
        + np.einsum("qjl,iqk->ijkl", Tbar, V3)
        - np.einsum("pik,qjl,pq->ijkl", T, Tbar, V2)
    )
    s_abs, s_scaled = _residual(lhs, rhs)

    return CommutationResiduals(
        torsion_commutator=t_abs,
        curvature_commutator=c_abs,
        four_index_swap=s_abs,
        torsion_commutator_scaled=t_scaled,
        curvature_commutator_scaled=c_scaled,
        four_index_swap_scaled=s_scaled,
        curvature_index_gap=gap,
        entry=m.entry,
    )


def identity_suite(
    n_values: Sequence[int] = (2, 3),
    entries: Iterable[str] = CATALOG_ENTRIES,
    points: int = 100,
    seed: int = 0,
    radius: float = 0.5,
    tolerance: float = 1e-8,
) -> IdentitySuiteReport:
    """
    Runs commutation_residuals over catalog metrics, their scalars and random base points.

    Args:
        n_values: Complex dimensions to test.
        entries: Catalog entry names.
        points: Random base points per (n, entry).
        seed: Seed for numpy's default generator.
        radius: Base point coordinates are drawn uniformly from [-radius, radius].
        tolerance: Scaled residual above which the suite fails.

    Returns:
        IdentitySuiteReport with the maxima and the worst case.
    """
    entries = list(entries)
    rng = np.random.default_rng(seed)
    report = IdentitySuiteReport(n_values=list(n_values), entries=entries, points=points, evaluations=0)
    worst = -1.0
    maxima = {name: 0.0 for name in IDENTITY_NAMES}
    scaled = {name: 0.0 for name in IDENTITY_NAMES}
    for n in n_values:
        for entry in entries:
            for _ in range(points):
                base = rng.uniform(-radius, radius, size=2 * n)
                m, scalars = catalog(entry, base)
                for name, v in scalars.items():
                    res = commutation_residuals(v, m)
                    res.scalar = name
                    report.evaluations += 1
                    for key in IDENTITY_NAMES:
                        maxima[key] = max(maxima[key], getattr(res, key))
                        scaled[key] = max(scaled[key], getattr(res, f"{key}_scaled"))
                    report.max_curvature_index_gap = max(report.max_curvature_index_gap, res.curvature_index_gap)
                    if res.worst_scaled() > worst:
                        worst = res.worst_scaled()
                        report.worst_case = res
    report.max_residuals = maxima
    report.max_scaled_residuals = scaled
    report.passed = max(scaled.values()) <= tolerance
    logger.info("identity suite: %d evaluations, worst scaled residual %.3e", report.evaluations, worst)
    return report
