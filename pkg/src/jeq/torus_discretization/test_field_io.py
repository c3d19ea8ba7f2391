import os
import shutil
import tempfile
import unittest

import numpy as np

from jeq.errors import IoError, ParseError
from jeq.torus_discretization.field_io_implementation import read_field, write_field
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField


class FieldIoTest(unittest.TestCase):
    """
    Unit tests for the plain-text field format.
    """

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.path = os.path.join(self.test_dir, "field.csv")
        self.rng = np.random.default_rng(9)
        self.grid = Grid.uniform(2, 4)

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def test_scalar_round_trip_is_bit_identical(self):
        field = ScalarField(self.grid, self.rng.normal(size=self.grid.shape))
        write_field(self.path, field)
        back = read_field(self.path)
        self.assertEqual(back.grid, self.grid)
        np.testing.assert_array_equal(back.values, field.values)

    def test_hermitian_round_trip_keeps_topology(self):
        grid = Grid.uniform(2, 4, "box")
        B = self.rng.normal(size=grid.shape + (2, 2)) + 1j * self.rng.normal(size=grid.shape + (2, 2))
        field = HermitianField(grid, B + np.conj(np.swapaxes(B, -1, -2)))
        write_field(self.path, field)
        back = read_field(self.path, kind="hermitian")
        self.assertEqual(back.grid.topology, "box")
        np.testing.assert_array_equal(back.values, field.values)

    def test_header_format(self):
        write_field(self.path, ScalarField.constant(self.grid, 1.0))
        with open(self.path) as handle:
            header = handle.readline().strip()
            first = handle.readline().strip()
        self.assertTrue(header.startswith("# jeq-field v1, n=2, shape=4,4,4,4, kind=scalar"))
        self.assertEqual(first, "0,0,0,0,1")

    def test_malformed_row_names_line(self):
        write_field(self.path, ScalarField.constant(self.grid, 1.0))
        with open(self.path) as handle:
            lines = handle.readlines()
        lines[5] = "0,0,1,oops,2.0\n"
        with open(self.path, "w") as handle:
            handle.writelines(lines)
        with self.assertRaises(ParseError) as ctx:
            read_field(self.path)
        self.assertEqual(ctx.exception.line, 6)

    def test_dimension_mismatch(self):
        with open(self.path, "w") as handle:
            handle.write("# jeq-field v1, n=3, shape=4,4,4,4, kind=scalar\n")
        with self.assertRaises(ParseError):
            read_field(self.path)
        write_field(self.path, ScalarField.constant(self.grid, 1.0))
        with self.assertRaises(ParseError):
            read_field(self.path, grid=Grid.uniform(2, 5))
        with self.assertRaises(ParseError):
            read_field(self.path, kind="hermitian")

    def test_missing_point(self):
        write_field(self.path, ScalarField.constant(self.grid, 1.0))
        with open(self.path) as handle:
            lines = handle.readlines()
        with open(self.path, "w") as handle:
            handle.writelines(lines[:-1])
        with self.assertRaises(ParseError):
            read_field(self.path)

    def test_missing_file(self):
        with self.assertRaises(IoError):
            read_field(os.path.join(self.test_dir, "absent.csv"))


if __name__ == "__main__":
    unittest.main()
