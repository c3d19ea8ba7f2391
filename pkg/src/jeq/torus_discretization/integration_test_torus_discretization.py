import os
import shutil
import tempfile
import unittest

import numpy as np

from jeq.torus_discretization import (
    Grid,
    HermitianField,
    diagnostics,
    gfrak_field,
    hermitian_field,
    mean_zero,
    read_field,
    residual_field,
    scalar_field,
    write_field,
)


class TorusDiscretizationIntegrationTest(unittest.TestCase):
    """
    Expression -> field files -> gfrak and residual -> diagnostics on a periodic grid.
    """

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_pipeline(self):
        grid = Grid.uniform(2, 8)
        chi = hermitian_field("2.0 + ddbar(0.05*sin(2*pi*x1))", grid)
        u = mean_zero(scalar_field("1 + 0.05*cos(2*pi*x2)*sin(2*pi*y1)", grid))
        g = HermitianField.identity(grid)

        chi_path = os.path.join(self.test_dir, "chi.csv")
        u_path = os.path.join(self.test_dir, "u.csv")
        write_field(chi_path, chi)
        write_field(u_path, u)
        chi = read_field(chi_path, grid=grid, kind="hermitian")
        u = read_field(u_path, grid=grid, kind="scalar")

        gfrak, margin = gfrak_field(chi, u, g)
        self.assertGreater(margin, 0.5)
        psi = scalar_field("1.0", grid)
        r = residual_field(gfrak, g, psi)
        self.assertEqual(r.values.shape, grid.shape)
        d = diagnostics(u, chi, g)
        self.assertAlmostEqual(float(np.mean(u.values)), 0.0, places=14)
        self.assertGreater(d.W_max, 3.0)
        self.assertGreater(d.osc, 0.0)


if __name__ == "__main__":
    unittest.main()
