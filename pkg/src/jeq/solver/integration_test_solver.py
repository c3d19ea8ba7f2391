import unittest

import numpy as np

from jeq.solver import (
    SolveConfig,
    derivative_diagnostic,
    estimate_monitor,
    manufactured_config,
    manufactured_dirichlet,
    solve_closed,
    solve_dirichlet,
)
from jeq.torus_discretization import Grid, HermitianField, hermitian_field, mean_zero, scalar_field


class SolverIntegrationTest(unittest.TestCase):
    """
    Closed and Dirichlet solves followed by the diagnostics and the estimate monitor.
    """

    def test_closed_pipeline(self):
        grid = Grid.uniform(2, 8)
        g = HermitianField.identity(grid)
        chi = hermitian_field("2.0 + ddbar(0.05*sin(2*pi*x1)*cos(2*pi*y2))", grid)
        usub = mean_zero(scalar_field("0.01*cos(2*pi*x2)", grid))
        cfg = SolveConfig()

        state, diag = solve_closed(chi, g, cfg, usub=usub)
        self.assertLessEqual(state.residual_norm, cfg.newton_tol)
        self.assertGreater(state.positivity_margin, cfg.positivity_floor)
        self.assertGreater(diag.osc, 0.0)

        residuals = [r["residual"] for r in state.log_records()]
        self.assertTrue(all(b < a for a, b in zip(residuals, residuals[1:])))

        report = estimate_monitor(state, usub, chi, g, cfg=cfg)
        self.assertGreaterEqual(report.C0, 0.0)
        self.assertGreaterEqual(report.trace_bound_gap_min, -1e-12)
        self.assertTrue(report.lemma_margin_min is None or report.lemma_margin_min >= -1e-8)

        # periodic stencils are second order, the derivative check stays small
        self.assertLess(float(np.max(derivative_diagnostic(state, g, chi).values)), 0.5)

    def test_dirichlet_pipeline(self):
        case = manufactured_dirichlet(7)
        p = case.problem
        cfg = manufactured_config()
        state, diag = solve_dirichlet(p.chi, p.g, p.psi, p.phi, case.usub, cfg, u0=case.initial)
        self.assertLessEqual(state.residual_norm, cfg.newton_tol)
        self.assertIsNotNone(diag.boundary_grad_max)

        report = estimate_monitor(state, case.usub, p.chi, p.g, p.psi, cfg=cfg)
        self.assertAlmostEqual(report.residual_norm, state.residual_norm, delta=1e-12)
        self.assertEqual(len(report.testfn_hess_max_location), 4)
        self.assertTrue(report.lemma_margin_min is None or report.lemma_margin_min >= -1e-8)


if __name__ == "__main__":
    unittest.main()
