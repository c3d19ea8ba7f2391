import functools
from typing import List, Sequence, Tuple

import numpy as np

from jeq.errors import GridTooSmall, NonHermitian

TOPOLOGIES = ("periodic", "box")
MIN_POINTS = 4


class Grid:
    """
    A uniform grid on the unit cube of R^{2n} with axes (x_1..x_n, y_1..y_n).

    Periodic grids have s points per unit-length axis (spacing 1/s, the point 1
    is identified with 0). Box grids include both faces (spacing 1/(s-1)) and
    store Dirichlet data on their boundary points.

    Args:
        n: Complex dimension.
        shape: 2n point counts, each >= 4.
        topology: "periodic" or "box".

    Raises:
        GridTooSmall: If any axis has fewer than 4 points.
        ValueError: If the shape does not have 2n entries or the topology is unknown.
    """

    def __init__(self, n: int, shape: Sequence[int], topology: str = "periodic"):
        shape = tuple(int(s) for s in shape)
        if n < 1 or len(shape) != 2 * n:
            raise ValueError(f"a grid for n={n} needs {2 * n} axis sizes, got {len(shape)}")
        if topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology '{topology}'; choose from {', '.join(TOPOLOGIES)}")
        if min(shape) < MIN_POINTS:
            raise GridTooSmall(f"every axis needs at least {MIN_POINTS} points, got shape {shape}")
        self.n = n
        self.shape = shape
        self.topology = topology

    @classmethod
    def uniform(cls, n: int, points: int, topology: str = "periodic") -> "Grid":
        return cls(n, (points,) * (2 * n), topology)

    @property
    def periodic(self) -> bool:
        return self.topology == "periodic"

    @property
    def ndim(self) -> int:
        return 2 * self.n

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacing(self) -> Tuple[float, ...]:
        if self.periodic:
            return tuple(1.0 / s for s in self.shape)
        return tuple(1.0 / (s - 1) for s in self.shape)

    def axes(self) -> List[np.ndarray]:
        return [np.arange(s) * h for s, h in zip(self.shape, self.spacing)]

    @functools.cached_property
    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Coordinate arrays (x_1..x_n, y_1..y_n), each of the grid shape."""
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def inner_mask(self, depth: int = 1) -> np.ndarray:
        """Points at least ``depth`` indices away from every box face (all points when periodic)."""
        if self.periodic:
            return np.ones(self.shape, dtype=bool)
        mask = np.ones(self.shape, dtype=bool)
        for axis, s in enumerate(self.shape):
            index = np.arange(s)
            keep = (index >= depth) & (index <= s - 1 - depth)
            mask &= keep.reshape([-1 if a == axis else 1 for a in range(self.ndim)])
        return mask

    @property
    def interior_mask(self) -> np.ndarray:
        return self.inner_mask(1)

    @property
    def boundary_mask(self) -> np.ndarray:
        return ~self.interior_mask

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.shape == other.shape
            and self.topology == other.topology
        )

    def __hash__(self) -> int:
        return hash((self.n, self.shape, self.topology))

    def __repr__(self) -> str:
        return f"Grid(n={self.n}, shape={self.shape}, topology='{self.topology}')"


class ScalarField:
    """One real value per grid point."""
    kind = "scalar"

    def __init__(self, grid: Grid, values):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            values = np.broadcast_to(values, grid.shape).copy()
        self.grid = grid
        self.values = values

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    def __repr__(self) -> str:
        return f"ScalarField({self.grid!r})"


class HermitianField:
    """
    One Hermitian n x n coefficient matrix per grid point; values[..., i, j] is the (i, jbar) entry.

    Raises:
        NonHermitian: If ``check`` is set and some point is not Hermitian to 1e-12 (relative).
    """
    kind = "hermitian"

    def __init__(self, grid: Grid, values, check: bool = True):
        values = np.asarray(values, dtype=np.complex128)
        target = grid.shape + (grid.n, grid.n)
        if values.shape != target:
            try:
                values = np.broadcast_to(values, target).copy()
            except ValueError as exc:
                raise ValueError(f"hermitian field needs shape {target}, got {values.shape}") from exc
        if check:
            scale = max(1.0, float(np.max(np.abs(values))))
            skew = np.max(np.abs(values - np.conj(np.swapaxes(values, -1, -2))))
            if skew > 1e-12 * scale:
                raise NonHermitian(f"field is not pointwise Hermitian (max skew {skew:.3e})")
        self.grid = grid
        self.values = values

    @classmethod
    def constant(cls, grid: Grid, matrix) -> "HermitianField":
        return cls(grid, np.asarray(matrix, dtype=np.complex128))

    @classmethod
    def identity(cls, grid: Grid, scale: float = 1.0) -> "HermitianField":
        return cls.constant(grid, scale * np.eye(grid.n))

    def __repr__(self) -> str:
        return f"HermitianField({self.grid!r})"
