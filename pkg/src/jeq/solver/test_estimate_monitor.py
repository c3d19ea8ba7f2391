import unittest

import numpy as np

from jeq.errors import NotSolved
from jeq.solver.estimate_monitor_implementation import estimate_monitor
from jeq.solver.manufactured_implementation import manufactured_dirichlet, solve_manufactured
from jeq.solver.solve_state_implementation import SolveState
from jeq.torus_discretization.diagnostics_implementation import gradient_squared
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField


class EstimateMonitorTest(unittest.TestCase):
    """
    Unit tests for the estimate monitor on solved states.
    """

    def setUp(self):
        self.grid = Grid.uniform(2, 6)
        self.g = HermitianField.identity(self.grid)
        self.chi = HermitianField.identity(self.grid, 2.0)
        self.zero = ScalarField.constant(self.grid, 0.0)
        self.state = SolveState(u=self.zero, c=1.0, residual_norm=0.0, positivity_margin=2.0)

    def test_trivial_state(self):
        report = estimate_monitor(self.state, self.zero, self.chi, self.g)
        self.assertEqual(report.C0, 0.0)
        self.assertEqual(report.epsilon, 0.5)
        self.assertEqual(report.testfn_grad_max, 0.0)
        self.assertAlmostEqual(report.W_max, 4.0, delta=1e-14)
        # W = 4 stays below the threshold, so the bound is vacuous here
        self.assertGreater(report.bigN, report.W_max)
        self.assertEqual(report.lemma_points, 0)
        self.assertIsNone(report.lemma_margin_min)
        self.assertAlmostEqual(report.trace_bound_gap_min, 1.5, delta=1e-14)
        self.assertAlmostEqual(report.f_trace_max, 0.5, delta=1e-14)
        self.assertAlmostEqual(report.f_trace_gap_min, 0.5, delta=1e-14)
        self.assertAlmostEqual(report.rhs_squared_max, 1.0, delta=1e-14)

    def test_amplitudes_recorded(self):
        report = estimate_monitor(self.state, self.zero, self.chi, self.g, A_grad=2.0, A_hess=3.0)
        self.assertEqual(report.A_grad, 2.0)
        self.assertEqual(report.A_hess, 3.0)
        # W is constant, so the second-order test function is exp(exp(0)) W
        self.assertAlmostEqual(report.testfn_hess_max, np.e * 4.0, delta=1e-12)

    def test_unsolved_state_rejected(self):
        state = SolveState(u=self.zero, c=1.5, residual_norm=0.0, positivity_margin=2.0)
        with self.assertRaises(NotSolved):
            estimate_monitor(state, self.zero, self.chi, self.g)

    def test_stale_residual_is_recomputed(self):
        x1 = self.grid.coordinates[0]
        bumped = ScalarField(self.grid, 0.01 * np.sin(2 * np.pi * x1))
        stale = SolveState(u=bumped, c=1.0, residual_norm=0.0, positivity_margin=2.0)
        with self.assertRaises(NotSolved):
            estimate_monitor(stale, self.zero, self.chi, self.g)
        report = estimate_monitor(self.state, self.zero, self.chi, self.g)
        self.assertLess(report.residual_norm, 1e-14)

    def test_lemma_bound_checked_where_trace_is_large(self):
        """gfrak = diag(100, t) solves the equation with psi = 1; usub brings chi down to 1.5 I."""
        grid = Grid.uniform(2, 6, "box")
        big, small = 100.0, 1.0 / 1.99
        chi = HermitianField.constant(grid, np.diag([big, small]))
        g = HermitianField.identity(grid)
        psi = ScalarField.constant(grid, 1.0)
        zero = ScalarField.constant(grid, 0.0)
        x1, x2, y1, y2 = grid.coordinates
        usub = ScalarField(grid, -(big - 1.5) * (x1 ** 2 + y1 ** 2) + (1.5 - small) * (x2 ** 2 + y2 ** 2))
        state = SolveState(u=zero, residual_norm=0.0, positivity_margin=small)
        report = estimate_monitor(state, usub, chi, g, psi)
        self.assertAlmostEqual(report.epsilon, 1.0 / 1.5, delta=1e-10)
        self.assertAlmostEqual(report.W_max, big + small, delta=1e-10)
        self.assertLess(report.bigN, report.W_max)
        self.assertEqual(report.lemma_points, int(np.count_nonzero(grid.interior_mask)))
        self.assertGreaterEqual(report.lemma_margin_min, -1e-8)
        expected = 1.5 / big ** 2 + 1.5 / small ** 2 - (2.0 + report.theta)
        self.assertAlmostEqual(report.lemma_margin_min, expected, delta=1e-8)

    def test_solution_as_subsolution(self):
        case = manufactured_dirichlet(7)
        state, _ = solve_manufactured(case)
        p = case.problem
        report = estimate_monitor(state, state.u, p.chi, p.g, p.psi, A_grad=1.5)
        grad2 = gradient_squared(state.u, p.g)
        location = [int(i) for i in np.unravel_index(int(np.argmax(grad2)), grad2.shape)]
        self.assertEqual(report.testfn_grad_max_location, location)
        self.assertAlmostEqual(report.testfn_grad_max, np.exp(1.5) * float(np.max(grad2)), delta=1e-10)
        self.assertGreaterEqual(report.trace_bound_gap_min, -1e-12)
        self.assertGreaterEqual(report.f_trace_gap_min, -1e-12)
        self.assertTrue(report.lemma_margin_min is None or report.lemma_margin_min >= -1e-8)

    def test_report_round_trips(self):
        report = estimate_monitor(self.state, self.zero, self.chi, self.g)
        self.assertEqual(type(report).model_validate(report.report()), report)


if __name__ == "__main__":
    unittest.main()
