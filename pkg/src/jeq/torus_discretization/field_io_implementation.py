"""Plain-text field files.

Header: ``# jeq-field v1, n=<n>, shape=<s1,...>, kind=scalar|hermitian[, topology=periodic|box]``,
then one row per point in C order: the integer multi-index followed by the
value (scalar) or the re, im pairs of the n x n matrix in row-major order.
Values are written with 17 significant digits, so a write/read round trip is
bit-identical.
"""

import logging
import re
from typing import Optional, Union

import numpy as np

from jeq.errors import GridTooSmall, IoError, ParseError
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField

logger = logging.getLogger(__name__)

HEADER = re.compile(
    r"^#\s*jeq-field\s+v1\s*,\s*n\s*=\s*(\d+)\s*,\s*shape\s*=\s*([\d,\s]+?)\s*,\s*kind\s*=\s*(scalar|hermitian)"
    r"(?:\s*,\s*topology\s*=\s*(periodic|box))?\s*$"
)

Field = Union[ScalarField, HermitianField]


def write_field(path: str, field: Field) -> None:
    """
    Writes a scalar or Hermitian field.

    Raises:
        IoError: If the file cannot be written.
    """
    grid = field.grid
    shape = ",".join(str(s) for s in grid.shape)
    header = f"# jeq-field v1, n={grid.n}, shape={shape}, kind={field.kind}, topology={grid.topology}\n"
    index = np.indices(grid.shape).reshape(grid.ndim, -1).T
    if field.kind == "scalar":
        values = field.values.reshape(-1, 1)
    else:
        flat = field.values.reshape(grid.size, -1)
        values = np.empty((grid.size, 2 * flat.shape[1]))
        values[:, 0::2] = flat.real
        values[:, 1::2] = flat.imag
    try:
        with open(path, "w") as handle:
            handle.write(header)
            for idx, row in zip(index, values):
                handle.write(",".join(str(int(i)) for i in idx))
                handle.write(",")
                handle.write(",".join(format(float(v), ".17g") for v in row))
                handle.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write field file {path}: {exc}") from exc
    logger.debug("wrote %s field to %s", field.kind, path)


def read_field(
    path: str,
    grid: Optional[Grid] = None,
    kind: Optional[str] = None,
) -> Field:
    """
    Reads a field file.

    Args:
        path: File to read.
        grid: If given, the header must describe the same n and shape; the grid's
            topology is used.
        kind: If given, the header kind must match.

    Returns:
        ScalarField or HermitianField.

    Raises:
        IoError: If the file cannot be opened.
        ParseError: With the line number, for a malformed header or row, a
            dimension mismatch, or a missing or repeated point.
    """
    try:
        with open(path) as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read field file {path}: {exc}") from exc
    if not lines:
        raise ParseError("empty field file", line=1)

    match = HEADER.match(lines[0].strip())
    if not match:
        raise ParseError("expected header '# jeq-field v1, n=<n>, shape=<s1,...>, kind=scalar|hermitian'", line=1)
    n = int(match.group(1))
    try:
        shape = tuple(int(s) for s in match.group(2).split(","))
    except ValueError:
        raise ParseError(f"bad shape '{match.group(2)}'", line=1)
    file_kind = match.group(3)
    topology = match.group(4) or "periodic"
    if len(shape) != 2 * n:
        raise ParseError(f"shape has {len(shape)} axes but n={n} needs {2 * n}", line=1)
    if grid is not None:
        if grid.n != n or grid.shape != shape:
            raise ParseError(f"field is n={n}, shape={shape} but the grid is n={grid.n}, shape={grid.shape}", line=1)
        topology = grid.topology
    if kind is not None and kind != file_kind:
        raise ParseError(f"expected a {kind} field, file holds {file_kind}", line=1)
    try:
        grid = Grid(n, shape, topology)
    except (ValueError, GridTooSmall) as exc:
        raise ParseError(str(exc), line=1)

    width = 1 if file_kind == "scalar" else 2 * n * n
    values = np.empty((grid.size, width))
    seen = np.zeros(grid.size, dtype=bool)
    for lineno, line in enumerate(lines[1:], start=2):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split(",")
        if len(parts) != grid.ndim + width:
            raise ParseError(f"expected {grid.ndim} indices and {width} values, got {len(parts)} columns", line=lineno)
        try:
            idx = tuple(int(p) for p in parts[:grid.ndim])
            row = [float(p) for p in parts[grid.ndim:]]
        except ValueError:
            raise ParseError(f"non-numeric entry in row '{text}'", line=lineno)
        if any(i < 0 or i >= s for i, s in zip(idx, shape)):
            raise ParseError(f"index {idx} outside shape {shape}", line=lineno)
        flat = int(np.ravel_multi_index(idx, shape))
        if seen[flat]:
            raise ParseError(f"point {idx} given twice", line=lineno)
        seen[flat] = True
        values[flat] = row
    if not np.all(seen):
        missing = tuple(int(i) for i in np.unravel_index(int(np.argmin(seen)), shape))
        raise ParseError(f"point {missing} missing", line=len(lines))

    if file_kind == "scalar":
        return ScalarField(grid, values[:, 0].reshape(shape))
    matrices = (values[:, 0::2] + 1j * values[:, 1::2]).reshape(shape + (n, n))
    return HermitianField(grid, matrices)
