"""Estimate monitor: the quantities of the a priori estimates, evaluated on a solved state.

Gradient test function: exp(A_grad exp(eta)) |grad u|^2 with eta = usub - u.
Second-order test function: exp(exp(A_hess eta)) W with
eta = usub - u + sup(u - usub) and W = tr_g chi + Delta u.
The linearized-operator lower bound is checked where W >= bigN:
tr(F (chi + Hess usub)) >= (n + theta)/psi with F = gfrak^{-1} g gfrak^{-1}.
"""

import logging
from typing import List, Optional

import numpy as np

from jeq.errors import NotSolved, PositivityLost
from jeq.pointwise_algebra.j_operator_implementation import linearized_coefficients
from jeq.pointwise_algebra.lemma_threshold_implementation import lemma_threshold
from jeq.pointwise_algebra.relative_spectrum_implementation import batched_relative_spectrum
from jeq.solver.evaluate_implementation import evaluate
from jeq.solver.solve_state_implementation import EstimateReport, Problem, SolveConfig, SolveState
from jeq.torus_discretization.diagnostics_implementation import diagnostics, gradient_squared
from jeq.torus_discretization.grid_implementation import HermitianField, ScalarField
from jeq.torus_discretization.residual_field_implementation import gfrak_field

logger = logging.getLogger(__name__)

SOLVED_FACTOR = 10.0


def _real_trace(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("...ij,...ji->...", A, B))


def _argmax(values: np.ndarray) -> List[int]:
    return [int(i) for i in np.unravel_index(int(np.argmax(values)), values.shape)]


def estimate_monitor(
    state: SolveState,
    usub: ScalarField,
    chi: HermitianField,
    g: HermitianField,
    psi: Optional[ScalarField] = None,
    A_grad: float = 1.0,
    A_hess: float = 1.0,
    cfg: Optional[SolveConfig] = None,
) -> EstimateReport:
    """
    Evaluates the estimate quantities on a solved state.

    Args:
        state: Solved state; closed problems (psi None) use psi = n/c.
        usub: Admissible subsolution.
        chi: Background form.
        g: Reference metric.
        psi: Right-hand side of a Dirichlet problem.
        A_grad: Amplitude of the gradient test function.
        A_hess: Amplitude of the second-order test function.
        cfg: Supplies newton_tol for the solved check.

    Returns:
        EstimateReport.

    Raises:
        NotSolved: If the residual of state.u, recomputed here, exceeds 10 newton_tol.
        PositivityLost: If usub or u is not admissible.
        InfeasibleThreshold: If no threshold exists for the extracted bounds.
    """
    cfg = cfg or SolveConfig()
    u = state.u
    grid = u.grid
    problem = Problem(chi, g) if grid.periodic else Problem(chi, g, psi, u)
    # the stored norm may belong to an earlier iterate
    current = evaluate(problem, u, state.c)
    if current.margin <= 0:
        raise PositivityLost(f"solved state is not admissible (margin {current.margin:.3e})")
    if current.residual_norm > SOLVED_FACTOR * cfg.newton_tol:
        raise NotSolved(
            f"residual {current.residual_norm:.3e} exceeds {SOLVED_FACTOR:g} x newton_tol = "
            f"{SOLVED_FACTOR * cfg.newton_tol:.3e}"
        )
    n = grid.n
    mask = grid.interior_mask
    psi_values = np.full(grid.shape, n / state.c) if psi is None else psi.values

    chi_sub, sub_margin = gfrak_field(chi, usub, g)
    gfrak = current.gfrak
    if sub_margin <= 0:
        raise PositivityLost(f"usub is not admissible (margin {sub_margin:.3e})")

    lam = batched_relative_spectrum(chi_sub.values[mask], g.values[mask])
    epsilon = min(1.0, float(np.min(lam)), 1.0 / float(np.max(lam)))
    psi_min = float(np.min(psi_values[mask]))
    psi_max = float(np.max(psi_values[mask]))
    thr = lemma_threshold(epsilon, psi_min, psi_max, n)

    diag = diagnostics(u, chi, g, usub)
    W = diag.W_field.values

    eta = usub.values - u.values
    grad_test = np.exp(A_grad * np.exp(eta)) * gradient_squared(u, g)
    shifted = eta + diag.sup_u_minus_usub
    hess_test = np.exp(np.exp(A_hess * shifted)) * W

    F = linearized_coefficients(gfrak.values[mask], g.values[mask])
    eye = np.broadcast_to(np.eye(n, dtype=np.complex128), F.shape)
    inv = np.linalg.solve(gfrak.values[mask], eye)
    g_in = g.values[mask]
    rhs = n / psi_values[mask]

    lemma = _real_trace(F, chi_sub.values[mask]) - (n + thr.theta) / psi_values[mask]
    qualifying = W[mask] >= thr.bigN
    lemma_min = float(np.min(lemma[qualifying])) if np.any(qualifying) else None

    trace_gap = _real_trace(inv, chi_sub.values[mask]) - epsilon * _real_trace(inv, g_in)
    f_trace = _real_trace(F, g_in)
    f_gap = _real_trace(inv, g_in) ** 2 - f_trace

    report = EstimateReport(
        C0=diag.osc,
        grad_max=diag.grad_max,
        lap_max=diag.lap_max,
        W_max=diag.W_max,
        boundary_grad_max=diag.boundary_grad_max,
        boundary_lap_max=diag.boundary_lap_max,
        residual_norm=current.residual_norm,
        epsilon=epsilon,
        theta=thr.theta,
        bigN=thr.bigN,
        A_grad=A_grad,
        A_hess=A_hess,
        testfn_grad_max=float(np.max(grad_test)),
        testfn_grad_max_location=_argmax(grad_test),
        testfn_hess_max=float(np.max(hess_test)),
        testfn_hess_max_location=_argmax(hess_test),
        lemma_points=int(np.count_nonzero(qualifying)),
        lemma_margin_min=lemma_min,
        trace_bound_gap_min=float(np.min(trace_gap)),
        f_trace_max=float(np.max(f_trace)),
        f_trace_gap_min=float(np.min(f_gap)),
        rhs_squared_max=float(np.max(rhs ** 2)),
    )
    logger.info(
        "monitor: C0 %.4g grad %.4g lap %.4g W %.4g (N %.4g, %d points)",
        report.C0, report.grad_max, report.lap_max, report.W_max, report.bigN, report.lemma_points,
    )
    return report
