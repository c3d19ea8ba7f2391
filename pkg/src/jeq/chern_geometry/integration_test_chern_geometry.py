import unittest

import numpy as np

from jeq.chern_geometry import (
    CATALOG_ENTRIES,
    KAHLER_ENTRIES,
    catalog,
    commutation_residuals,
    connection,
    covariant_derivatives,
    identity_suite,
)


class ChernGeometryIntegrationTest(unittest.TestCase):
    """
    Catalog -> connection -> covariant derivatives -> identity residuals, in both dimensions.
    """

    def test_pipeline_over_catalog(self):
        rng = np.random.default_rng(1)
        for n in (2, 3):
            for entry in CATALOG_ENTRIES:
                m, scalars = catalog(entry, rng.uniform(-0.4, 0.4, size=2 * n))
                data = connection(m)
                if entry in KAHLER_ENTRIES:
                    self.assertLess(np.max(np.abs(data.T)), 1e-12, entry)
                    # torsion-free: v_{i jbar k} symmetric in (i, k)
                    cov = covariant_derivatives(scalars["quartic"], m)
                    np.testing.assert_allclose(cov.v_ijk, np.transpose(cov.v_ijk, (2, 1, 0)), atol=1e-11)
                res = commutation_residuals(scalars["trig"], m)
                self.assertLessEqual(res.worst_scaled(), 1e-10, f"n={n} {entry}")

    def test_suite_report_serializes(self):
        report = identity_suite(n_values=(2,), entries=("conformal-exp",), points=2)
        dumped = report.model_dump()
        self.assertEqual(dumped["evaluations"], 10)
        self.assertTrue(dumped["passed"])
        self.assertEqual(dumped["worst_case"]["entry"], "conformal-exp")


if __name__ == "__main__":
    unittest.main()
