import unittest

import numpy as np

from jeq.errors import GridTooSmall, NonHermitian
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField


class GridTest(unittest.TestCase):
    """
    Unit tests for grids and field containers.
    """

    def test_periodic_spacing_and_coordinates(self):
        grid = Grid.uniform(2, 8)
        self.assertEqual(grid.spacing, (0.125,) * 4)
        x1 = grid.coordinates[0]
        self.assertEqual(x1.shape, (8, 8, 8, 8))
        self.assertEqual(x1[3, 0, 0, 0], 0.375)
        self.assertTrue(np.all(grid.interior_mask))

    def test_box_includes_faces(self):
        grid = Grid(2, (5, 5, 5, 5), "box")
        self.assertEqual(grid.spacing, (0.25,) * 4)
        self.assertEqual(grid.coordinates[3][0, 0, 0, -1], 1.0)
        self.assertEqual(int(np.sum(grid.interior_mask)), 3 ** 4)
        self.assertEqual(int(np.sum(grid.boundary_mask)), 5 ** 4 - 3 ** 4)
        self.assertEqual(int(np.sum(grid.inner_mask(2))), 1)

    def test_too_small(self):
        with self.assertRaises(GridTooSmall):
            Grid(2, (8, 8, 3, 8))

    def test_bad_shape_and_topology(self):
        with self.assertRaises(ValueError):
            Grid(2, (8, 8, 8))
        with self.assertRaises(ValueError):
            Grid(2, (8,) * 4, "sphere")

    def test_equality(self):
        self.assertEqual(Grid.uniform(2, 6), Grid(2, [6, 6, 6, 6]))
        self.assertNotEqual(Grid.uniform(2, 6), Grid.uniform(2, 6, "box"))

    def test_fields(self):
        grid = Grid.uniform(2, 4)
        self.assertEqual(ScalarField.constant(grid, 2.0).values.shape, grid.shape)
        field = HermitianField.identity(grid, 3.0)
        self.assertEqual(field.values.shape, grid.shape + (2, 2))
        with self.assertRaises(NonHermitian):
            HermitianField.constant(grid, np.array([[1.0, 1.0], [0.0, 1.0]]))


if __name__ == "__main__":
    unittest.main()
