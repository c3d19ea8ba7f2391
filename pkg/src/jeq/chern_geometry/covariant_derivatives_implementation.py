import numpy as np

from jeq.errors import InsufficientOrder
from jeq.chern_geometry.connection_implementation import MetricJet, christoffel_jets
from jeq.chern_geometry.taylor_jet_implementation import TaylorJet, stack_jets


class CovariantDerivatives:
    """
    Chern covariant derivatives of a scalar up to fourth order, at the base point.

    Attributes:
        v_ij: v_{i jbar}, indexed [i, j].
        v_ijk: v_{i jbar k}, indexed [i, j, k].
        v_ijkbar: v_{i jbar kbar}, indexed [i, j, k].
        v_ijkl: v_{i jbar k lbar}, indexed [i, j, k, l].
        v_ijlk: v_{i jbar lbar k}, indexed [i, j, l, k].
    """

    def __init__(self, v_ij, v_ijk, v_ijkbar, v_ijkl, v_ijlk):
        self.v_ij = v_ij
        self.v_ijk = v_ijk
        self.v_ijkbar = v_ijkbar
        self.v_ijkl = v_ijkl
        self.v_ijlk = v_ijlk


def covariant_derivatives(v: TaylorJet, m: MetricJet) -> CovariantDerivatives:
    """
    Computes the covariant derivatives used by the commutation identities.

    v_{i jbar} = d_i dbar_j v; v_{i jbar k} = d_k v_{i jbar} - Gamma^l_{ki} v_{l jbar};
    v_{i jbar kbar} = dbar_k v_{i jbar} - conj(Gamma^l_{kj}) v_{i lbar};
    v_{i jbar k lbar} = dbar_l v_{i jbar k} - conj(Gamma^q_{lj}) v_{i qbar k};
    v_{i jbar lbar k} = d_k v_{i jbar lbar} - Gamma^p_{ki} v_{p jbar lbar}.

    Args:
        v: Real-valued scalar jet of order >= 4.
        m: Metric jet of order >= 3 on the same jet structure.

    Returns:
        CovariantDerivatives at the base point.

    Raises:
        InsufficientOrder: If v or the metric are too short.
    """
    if v.order < 4:
        raise InsufficientOrder(f"fourth covariant derivatives need a scalar jet of order >= 4, got {v.order}")
    if m.order < 3:
        raise InsufficientOrder(f"fourth covariant derivatives need a metric jet of order >= 3, got {m.order}")
    n = m.n
    _, Gamma = christoffel_jets(m)
    Gamma_bar = Gamma.conj()

    V2 = stack_jets([stack_jets([v.d(i).dbar(j) for j in range(n)]) for i in range(n)])

    dV2 = stack_jets([V2.d(k) for k in range(n)], axis=-1)
    V3 = dV2 - Gamma.contract("lki,lj->ijk", V2)

    dbarV2 = stack_jets([V2.dbar(k) for k in range(n)], axis=-1)
    V3b = dbarV2 - Gamma_bar.contract("lkj,il->ijk", V2)

    dbarV3 = stack_jets([V3.dbar(l) for l in range(n)], axis=-1)
    V4 = dbarV3 - Gamma_bar.contract("qlj,iqk->ijkl", V3)

    dV3b = stack_jets([V3b.d(k) for k in range(n)], axis=-1)
    V4s = dV3b - Gamma.contract("pki,pjl->ijlk", V3b)

    return CovariantDerivatives(
        v_ij=V2.value(),
        v_ijk=V3.value(),
        v_ijkbar=V3b.value(),
        v_ijkl=V4.value(),
        v_ijlk=V4s.value(),
    )
