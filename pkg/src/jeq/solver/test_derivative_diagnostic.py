import os
import unittest

import numpy as np

from jeq.solver.derivative_diagnostic_implementation import complex_derivative, derivative_diagnostic
from jeq.solver.evaluate_implementation import initial_state
from jeq.solver.manufactured_implementation import manufactured_dirichlet, solve_manufactured
from jeq.solver.solve_state_implementation import Problem, SolveState
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField

SLOW = bool(os.environ.get("JEQ_SLOW_TESTS"))


class DerivativeDiagnosticTest(unittest.TestCase):
    """
    Unit tests for the first-derivative check of the equation.
    """

    def test_complex_derivative_of_linear_function(self):
        grid = Grid.uniform(2, 6, "box")
        x1, x2, y1, y2 = grid.coordinates
        values = 3.0 * x1 + 2.0 * y1 - y2
        np.testing.assert_allclose(complex_derivative(values, grid, 0), 0.5 * (3.0 - 2.0j), atol=1e-12)
        np.testing.assert_allclose(complex_derivative(values, grid, 1), 0.5j, atol=1e-12)

    def test_constant_coefficient_solution(self):
        grid = Grid.uniform(2, 6)
        g = HermitianField.identity(grid)
        chi = HermitianField.identity(grid, 2.0)
        state = SolveState(u=ScalarField.constant(grid, 0.0), c=1.0, residual_norm=0.0, positivity_margin=2.0)
        np.testing.assert_allclose(derivative_diagnostic(state, g, chi).values, 0.0, atol=1e-14)

    def test_unsolved_state_is_flagged(self):
        grid = Grid.uniform(2, 8)
        g = HermitianField.identity(grid)
        chi = HermitianField.identity(grid, 2.0)
        x1 = grid.coordinates[0]
        problem = Problem(chi, g)
        state = initial_state(problem, ScalarField(grid, 0.02 * np.sin(2 * np.pi * x1)), c=1.0)
        self.assertGreater(float(np.max(derivative_diagnostic(state, g, chi).values)), 1e-3)

    def test_box_layer_excluded(self):
        case = manufactured_dirichlet(7)
        state, _ = solve_manufactured(case)
        p = case.problem
        values = derivative_diagnostic(state, p.g, p.chi, p.psi).values
        np.testing.assert_array_equal(values[~p.grid.inner_mask(2)], 0.0)
        self.assertTrue(np.all(np.isfinite(values)))

    @unittest.skipUnless(SLOW, "set JEQ_SLOW_TESTS=1 for the 17^4 solve")
    def test_second_order_shrinking(self):
        maxima = []
        for points in (9, 17):
            case = manufactured_dirichlet(points)
            state, _ = solve_manufactured(case)
            p = case.problem
            maxima.append(float(np.max(derivative_diagnostic(state, p.g, p.chi, p.psi).values)))
        self.assertGreaterEqual(maxima[0] / maxima[1], 3.0)
        self.assertLessEqual(maxima[0] / maxima[1], 5.0)


if __name__ == "__main__":
    unittest.main()
