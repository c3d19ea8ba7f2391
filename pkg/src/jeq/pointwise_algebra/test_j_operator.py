import os
import unittest

import numpy as np

from jeq.errors import PositivityLost
from jeq.pointwise_algebra.j_operator_implementation import j_operator, linearized_coefficients
from jeq.pointwise_algebra.relative_spectrum_implementation import relative_spectrum
from jeq.pointwise_algebra.spectrum_oracle_implementation import oracle_relative_spectrum

SLOW = bool(os.environ.get("JEQ_SLOW_TESTS"))


def random_pd(rng, n, shift=1.0):
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    M = B @ np.conj(B.T) + shift * np.eye(n)
    return 0.5 * (M + np.conj(M.T))


def random_hermitian(rng, n):
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (B + np.conj(B.T))


class JOperatorTest(unittest.TestCase):
    """
    Unit tests for tr(gfrak^{-1} g).
    """

    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_gfrak_equal_g_gives_n(self):
        g = random_pd(self.rng, 3)
        self.assertAlmostEqual(j_operator(g, g), 3.0, places=12)

    def test_diagonal_example(self):
        self.assertAlmostEqual(j_operator(np.diag([2.0, 2.0]), np.eye(2)), 1.0)

    def test_scaling_law(self):
        """j_operator(c A, g) * c equals j_operator(A, g) to 1e-12."""
        for _ in range(20):
            A = random_pd(self.rng, 3)
            g = random_pd(self.rng, 3)
            base = j_operator(A, g)
            for c in (0.5, 2.0, 10.0):
                self.assertAlmostEqual(j_operator(c * A, g) * c, base, delta=1e-12 * max(1.0, base))

    def test_matches_reciprocal_oracle_spectrum(self):
        A = random_pd(self.rng, 3)
        g = random_pd(self.rng, 3)
        expected = np.sum(1.0 / oracle_relative_spectrum(A, g))
        self.assertAlmostEqual(j_operator(A, g), expected, delta=1e-9 * expected)

    def test_positivity_lost_reports_index(self):
        stack = np.stack([np.eye(2), np.eye(2), np.diag([1.0, -0.5])])
        with self.assertRaises(PositivityLost) as ctx:
            j_operator(stack, np.eye(2))
        self.assertEqual(ctx.exception.index, (2,))

    def test_batched_shape(self):
        stack = np.broadcast_to(2.0 * np.eye(2), (4, 5, 2, 2))
        values = j_operator(stack, np.eye(2))
        self.assertEqual(values.shape, (4, 5))
        np.testing.assert_allclose(values, 1.0)


class LinearizedCoefficientsTest(unittest.TestCase):
    """
    Unit tests for F = gfrak^{-1} g gfrak^{-1}.
    """

    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_identity(self):
        np.testing.assert_allclose(linearized_coefficients(np.eye(2), np.eye(2)), np.eye(2))

    def test_diagonal_squares_reciprocals(self):
        F = linearized_coefficients(np.diag([2.0, 4.0]), np.eye(2))
        np.testing.assert_allclose(F, np.diag([0.25, 1.0 / 16.0]))

    def test_hermitian_positive_definite(self):
        F = linearized_coefficients(random_pd(self.rng, 3), random_pd(self.rng, 3))
        np.testing.assert_allclose(F, np.conj(F.T), atol=1e-14)
        self.assertGreater(relative_spectrum(F, np.eye(3))[-1], 0.0)

    def test_directional_derivative_matches_finite_difference(self):
        """d/dt tr((gfrak + tH)^{-1} g) = -tr(F H), checked by centered differences at step 1e-5."""
        samples = 1000 if SLOW else 200
        step = 1e-5
        for k in range(samples):
            n = 2 + k % 3
            gfrak = random_pd(self.rng, n)
            g = random_pd(self.rng, n)
            H = random_hermitian(self.rng, n)
            exact = -np.real(np.trace(linearized_coefficients(gfrak, g) @ H))
            fd = (j_operator(gfrak + step * H, g) - j_operator(gfrak - step * H, g)) / (2 * step)
            self.assertLessEqual(abs(fd - exact), 1e-6 * max(1.0, abs(exact)), msg=f"sample {k}")


if __name__ == '__main__':
    unittest.main()
