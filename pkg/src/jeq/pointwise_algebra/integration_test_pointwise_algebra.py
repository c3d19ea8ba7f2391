import unittest

import numpy as np

from jeq.pointwise_algebra import (
    batched_relative_spectrum,
    cone_check,
    j_operator,
    lemma_threshold,
    lemma_verify,
    linearized_coefficients,
    relative_spectrum,
    subsolution_check,
)


class PointwiseAlgebraIntegrationTest(unittest.TestCase):
    """
    Runs the pointwise chain used by the solver: spectrum of the subsolution,
    subsolution and cone checks, threshold, then the bound at a solution point.
    """

    def test_subsolution_to_threshold_chain(self):
        n = 2
        g = np.eye(n)
        chi_usub = np.diag([2.0, 2.0])
        psi = 1.0
        lam = relative_spectrum(chi_usub, g)
        self.assertTrue(subsolution_check(lam, psi))
        self.assertTrue(cone_check(lam, psi))

        eps = min(1.0, lam[-1], 1.0 / lam[0])
        thr = lemma_threshold(eps, psi, psi, n)

        # a diagonal solution point with large trace: 1/a + 1/b = n/psi
        a = 2.0 * thr.bigN
        b = 1.0 / (n / psi - 1.0 / a)
        gfrak = np.diag([a, b])
        self.assertAlmostEqual(j_operator(gfrak, g), n / psi, places=12)
        self.assertTrue(lemma_verify(np.array([a, b]), np.diag(chi_usub), psi, thr))

        F = linearized_coefficients(gfrak, g)
        self.assertGreaterEqual(np.real(np.trace(F @ chi_usub)), (n + thr.theta) / psi)

    def test_batched_field_of_pairs(self):
        rng = np.random.default_rng(1)
        field = np.zeros((4, 4, 2, 2), dtype=complex)
        field[...] = np.diag([3.0, 1.5])
        field[..., 0, 1] = 0.3j * rng.uniform(size=(4, 4))
        field[..., 1, 0] = np.conj(field[..., 0, 1])
        spectra = batched_relative_spectrum(field, np.eye(2))
        self.assertEqual(spectra.shape, (4, 4, 2))
        np.testing.assert_allclose(np.sum(spectra, axis=-1), 4.5, atol=1e-12)
        np.testing.assert_allclose(1.0 / spectra[..., 0] + 1.0 / spectra[..., 1], j_operator(field, np.eye(2)), atol=1e-12)


if __name__ == '__main__':
    unittest.main()
