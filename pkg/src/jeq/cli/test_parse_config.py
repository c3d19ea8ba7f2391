import os
import tempfile
import unittest

import numpy as np

from jeq.cli.parse_config_implementation import parse_config
from jeq.errors import ConfigError, IoError
from jeq.torus_discretization.field_io_implementation import write_field
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField


class ParseConfigTest(unittest.TestCase):
    """
    Unit tests for reading and validating problem files.
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, text, name="problem.cfg"):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as handle:
            handle.write(text)
        return path

    def test_minimal_config(self):
        config = parse_config(self.write("n = 2\nshape = 16,16,16,16\ntopology = periodic\nchi = 2.0\n"))
        self.assertEqual(config.shape, [16, 16, 16, 16])
        self.assertEqual(config.solver.newton_tol, 1e-10)
        self.assertEqual(config.A_grad, 1.0)
        self.assertIsNone(config.fields.psi)
        np.testing.assert_allclose(config.fields.chi.values[0, 0, 0, 0], 2.0 * np.eye(2))

    def test_comments_and_solver_keys(self):
        text = "# closed torus\nn = 2   # complex dimension\nshape = 6,6,6,6\nnewton_tol = 1e-9\nkrylov_restart = 30\n"
        config = parse_config(self.write(text))
        self.assertEqual(config.solver.newton_tol, 1e-9)
        self.assertEqual(config.solver.krylov_restart, 30)

    def test_missing_shape(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nchi = 2.0\n"))
        self.assertEqual(ctx.exception.key, "shape")
        self.assertIsNone(ctx.exception.line)

    def test_unknown_key_names_its_line(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 6,6,6,6\nnewton_tolerance = 1e-8\n"))
        self.assertEqual(ctx.exception.key, "newton_tolerance")
        self.assertEqual(ctx.exception.line, 3)

    def test_duplicate_and_malformed_lines(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nn = 3\n"))
        self.assertEqual((ctx.exception.key, ctx.exception.line), ("n", 2))
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape 6,6,6,6\n"))
        self.assertEqual(ctx.exception.line, 2)

    def test_invalid_values(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 1\nshape = 6,6\n"))
        self.assertEqual(ctx.exception.key, "n")
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 6,6,6\n"))
        self.assertEqual(ctx.exception.key, "shape")
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 6,6,6,6\narmijo_factor = 1.5\n"))
        self.assertEqual(ctx.exception.key, "armijo_factor")

    def test_chi_file_with_wrong_dimension(self):
        field = HermitianField.identity(Grid.uniform(3, 4), 2.0)
        write_field(os.path.join(self.tmp.name, "chi.csv"), field)
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 4,4,4,4\nchi = chi.csv\n"))
        self.assertEqual(ctx.exception.key, "chi")
        self.assertEqual(ctx.exception.line, 3)
        self.assertIn("n=3", str(ctx.exception))

    def test_field_files_relative_to_config(self):
        grid = Grid.uniform(2, 4, "box")
        x1 = grid.coordinates[0]
        write_field(os.path.join(self.tmp.name, "usub.csv"), ScalarField(grid, 0.1 * x1 * (1 - x1)))
        config = parse_config(self.write("n = 2\nshape = 4,4,4,4\ntopology = box\nusub = usub.csv\npsi = 1.0\n"))
        self.assertEqual(config.fields.usub.grid, grid)
        self.assertIsNone(config.fields.phi)

    def test_missing_field_file(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 4,4,4,4\nusub = nowhere.csv\n"))
        self.assertEqual(ctx.exception.key, "usub")

    def test_expressions(self):
        config = parse_config(self.write(
            "n = 2\nshape = 6,6,6,6\nchi = 2.0 + ddbar(0.05*sin(2*pi*x1))\npsi = 1 + 0.1*cos(2*pi*y2)\n"
        ))
        self.assertTrue(np.all(config.fields.psi.values > 0.8))
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 6,6,6,6\npsi = 1 + import(x1)\n"))
        self.assertEqual(ctx.exception.key, "psi")

    def test_boundary_data_needs_box(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 6,6,6,6\nphi = 0\n"))
        self.assertEqual(ctx.exception.key, "phi")

    def test_unknown_catalog_entry(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config(self.write("n = 2\nshape = 6,6,6,6\nentries = flat, hyperbolic\n"))
        self.assertEqual(ctx.exception.key, "entries")

    def test_unreadable_file(self):
        with self.assertRaises(IoError):
            parse_config(os.path.join(self.tmp.name, "absent.cfg"))


if __name__ == "__main__":
    unittest.main()
