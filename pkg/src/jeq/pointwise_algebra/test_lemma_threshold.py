import os
import unittest

import numpy as np
from scipy.optimize import brentq

from jeq.errors import HypothesisViolation, InfeasibleThreshold
from jeq.pointwise_algebra.lemma_threshold_implementation import (
    LemmaCertificate,
    lemma_batch_verify,
    lemma_corner_margin,
    lemma_threshold,
    lemma_verify,
    linearized_trace,
    sample_admissible,
)

SLOW = bool(os.environ.get("JEQ_SLOW_TESTS"))


def corner_configuration(n, W, psi):
    """Returns gfrak = (W - (n-1)t, t, ..., t) solving sum 1/gfrak_i = n/psi."""
    def equation(t):
        return 1.0 / (W - (n - 1) * t) + (n - 1) / t - n / psi
    t = brentq(equation, 1e-12 * W, W / n, xtol=1e-300, rtol=1e-15)
    return np.array([W - (n - 1) * t] + [t] * (n - 1))


class LemmaThresholdTest(unittest.TestCase):
    """
    Unit tests for the (theta, N) construction.
    """

    def test_theta_is_half_eps_psi_min(self):
        thr = lemma_threshold(0.5, 1.0, 1.0, 2)
        self.assertAlmostEqual(thr.theta, 0.25)
        self.assertGreaterEqual(thr.bigN, 2.0)
        self.assertTrue(0.0 < thr.delta < 2.0)

    def test_delta_satisfies_inequality_over_psi_range(self):
        for n in (2, 3, 4):
            thr = lemma_threshold(0.5, 0.5, 2.0, n)
            for psi in np.linspace(0.5, 2.0, 7):
                lhs = (n - thr.delta) ** 2 * (1 + thr.epsilon * psi / n) / (n * psi)
                self.assertGreaterEqual(lhs, (n + thr.theta) / psi)
            self.assertAlmostEqual(thr.bigN, max(n, n * 2.0 / thr.delta))

    def test_saturated_example(self):
        """eps = 1 and psi = n give theta = n/2."""
        for n in (2, 3):
            thr = lemma_threshold(1.0, float(n), float(n), n)
            self.assertAlmostEqual(thr.theta, n / 2.0)

    def test_small_epsilon_limit(self):
        thetas = [lemma_threshold(eps, 1.0, 1.0, 2).theta for eps in (1e-1, 1e-3, 1e-6)]
        self.assertTrue(thetas[0] > thetas[1] > thetas[2])
        self.assertLess(thetas[-1], 1e-6)

    def test_inconsistent_inputs(self):
        with self.assertRaises(InfeasibleThreshold):
            lemma_threshold(0.0, 1.0, 1.0, 2)
        with self.assertRaises(InfeasibleThreshold):
            lemma_threshold(0.5, 2.0, 1.0, 2)
        with self.assertRaises(InfeasibleThreshold):
            lemma_threshold(1.5, 1.0, 1.0, 2)


class LemmaVerifyTest(unittest.TestCase):
    """
    Unit tests for the pointwise bound and its randomized verifier.
    """

    def test_corner_configuration_holds(self):
        n, eps, psi = 2, 0.5, 0.5
        thr = lemma_threshold(eps, psi, psi, n)
        gfrak = corner_configuration(n, thr.bigN * (1 + 1e-9), psi)
        self.assertTrue(lemma_verify(gfrak, np.full(n, eps), psi, thr))

    def test_larger_subsolution_entries_increase_margin(self):
        n, eps, psi = 3, 0.5, 0.5
        thr = lemma_threshold(eps, psi, psi, n)
        gfrak = corner_configuration(n, thr.bigN * (1 + 1e-9), psi)
        low = linearized_trace(gfrak, np.full(n, eps))
        high = linearized_trace(gfrak, np.full(n, 1.0 / eps))
        self.assertTrue(lemma_verify(gfrak, np.full(n, 1.0 / eps), psi, thr))
        self.assertGreater(high, low)

    def test_hypothesis_violations(self):
        n, eps, psi = 2, 0.5, 0.5
        thr = lemma_threshold(eps, psi, psi, n)
        gfrak = corner_configuration(n, thr.bigN * (1 + 1e-9), psi)
        with self.assertRaises(HypothesisViolation):
            lemma_verify(gfrak * 1.1, np.full(n, eps), psi, thr)  # equation broken
        with self.assertRaises(HypothesisViolation):
            lemma_verify(gfrak, np.full(n, 0.1), psi, thr)  # below eps
        with self.assertRaises(HypothesisViolation):
            lemma_verify(corner_configuration(n, 1.5, psi), np.full(n, eps), psi, thr)  # trace below N
        with self.assertRaises(HypothesisViolation):
            lemma_verify(gfrak, np.full(n, eps), 0.7, thr)  # psi outside range

    def test_corner_family_margin_nonnegative(self):
        for n in (2, 3):
            for eps in (0.5, 1.0):
                thr = lemma_threshold(eps, 0.5, 2.0, n)
                corner = lemma_corner_margin(thr, points=50)
                self.assertIsNotNone(corner)
                self.assertGreaterEqual(corner, 0.0)

    def test_corner_family_empty_when_psi_exceeds_eps(self):
        thr = lemma_threshold(0.1, 0.5, 2.0, 2)
        self.assertIsNone(lemma_corner_margin(thr))

    def test_sampler_meets_hypotheses(self):
        thr = lemma_threshold(0.5, 0.5, 2.0, 3)
        gfrak, c, psi = sample_admissible(thr, 500, np.random.default_rng(0))
        self.assertGreater(len(psi), 0)
        for k in range(0, len(psi), 25):
            self.assertTrue(lemma_verify(gfrak[k], c[k], psi[k], thr))

    def test_unit_epsilon_pins_subsolution_entries(self):
        thr = lemma_threshold(1.0, 0.5, 2.0, 2)
        gfrak, c, psi = sample_admissible(thr, 200, np.random.default_rng(3))
        self.assertGreater(len(psi), 0)
        np.testing.assert_array_equal(c, 1.0)
        self.assertLessEqual(float(np.max(psi)), 1.0)
        cert = lemma_batch_verify(thr, samples=1000)
        self.assertEqual(cert.samples, 1000)
        self.assertEqual(cert.violations, 0)

    def test_vacuous_range_returns_empty_certificate(self):
        thr = lemma_threshold(1.0, 2.0, 2.0, 2)
        cert = lemma_batch_verify(thr, samples=10)
        self.assertEqual(cert.samples, 0)
        self.assertIsNone(cert.worst_margin)

    def test_batch_search_finds_no_counterexample(self):
        """Randomized search over eps in {0.1, 0.5, 1}, psi in [0.5, 2], n in {2, 3}."""
        samples = 100000 if SLOW else 5000
        for n in (2, 3):
            for eps in (0.1, 0.5, 1.0):
                thr = lemma_threshold(eps, 0.5, 2.0, n)
                cert = lemma_batch_verify(thr, samples=samples, seed=n * 10 + int(10 * eps))
                self.assertIsInstance(cert, LemmaCertificate)
                self.assertEqual(cert.samples, samples)
                self.assertEqual(cert.violations, 0, msg=f"n={n}, eps={eps}")
                self.assertGreaterEqual(cert.worst_margin, 0.0)

    def test_certificate_serializes(self):
        thr = lemma_threshold(0.5, 0.5, 0.5, 2)
        cert = lemma_batch_verify(thr, samples=100)
        record = cert.model_dump()
        for key in ("theta", "bigN", "samples", "worst_margin"):
            self.assertIn(key, record)


if __name__ == '__main__':
    unittest.main()
