"""Problem files: ``key = value`` lines with ``#`` comments.

Field values are a number, a path ending in ``.csv`` (relative to the config
file) or an expression over x1..xn, y1..yn. For chi a number means that
multiple of the metric and an expression may add ``c * ddbar(f)`` terms; the
metric is ``flat`` or a path. Solver settings are top-level keys named as the
SolveConfig fields.
"""

import logging
import os
from typing import Dict, List, Literal, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator

from jeq.chern_geometry.catalog_implementation import CATALOG_ENTRIES
from jeq.errors import ConfigError, IoError, JeqError
from jeq.solver.solve_state_implementation import SolveConfig
from jeq.torus_discretization.expression_implementation import hermitian_field, scalar_field
from jeq.torus_discretization.field_io_implementation import read_field
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField

logger = logging.getLogger(__name__)

LIST_KEYS = ("shape", "identity_n", "entries", "convergence_points", "trend_scales")


class ProblemFields(NamedTuple):
    grid: Grid
    g: HermitianField
    chi: HermitianField
    psi: Optional[ScalarField]
    usub: Optional[ScalarField]
    phi: Optional[ScalarField]
    u: Optional[ScalarField]


class ProblemConfig(BaseModel):
    """A validated problem file."""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=2)
    shape: List[int]
    topology: Literal["periodic", "box"] = "periodic"
    metric: str = "flat"
    chi: str = "2.0"
    psi: Optional[str] = None
    usub: Optional[str] = None
    phi: Optional[str] = None
    u: Optional[str] = None
    output: str = "."
    A_grad: float = 1.0
    A_hess: float = 1.0
    identity_n: List[int] = Field(default_factory=lambda: [2, 3])
    identity_points: int = Field(default=100, gt=0)
    entries: List[str] = Field(default_factory=lambda: list(CATALOG_ENTRIES))
    seed: int = 0
    convergence_points: List[int] = Field(default_factory=lambda: [9, 17])
    trend_scales: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0])
    trend_points: int = Field(default=9, ge=4)
    solver: SolveConfig = Field(default_factory=SolveConfig)

    _fields: Optional[ProblemFields] = PrivateAttr(default=None)

    @field_validator(*LIST_KEYS, mode="before")
    @classmethod
    def _split_list(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("shape")
    @classmethod
    def _check_shape(cls, value: List[int], info):
        n = info.data.get("n")
        if n is not None and len(value) != 2 * n:
            raise ValueError(f"needs {2 * n} axis sizes for n={n}, got {len(value)}")
        if any(s < 4 for s in value):
            raise ValueError("every axis needs at least 4 points")
        return value

    @field_validator("entries")
    @classmethod
    def _check_entries(cls, value: List[str]):
        unknown = [e for e in value if e not in CATALOG_ENTRIES]
        if unknown:
            raise ValueError(f"unknown catalog entries {unknown}; choose from {', '.join(CATALOG_ENTRIES)}")
        return value

    @property
    def fields(self) -> ProblemFields:
        return self._fields


def _read_lines(path: str):
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    values: Dict[str, str] = {}
    lines: Dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", line=lineno)
        if key in values:
            raise ConfigError(f"given twice (first on line {lines[key]})", key=key, line=lineno)
        values[key] = value
        lines[key] = lineno
    return values, lines


def _number(text: str) -> Optional[float]:
    try:
        return float(text)
    except ValueError:
        return None


def _resolve(text: str, base_dir: str) -> str:
    return text if os.path.isabs(text) else os.path.join(base_dir, text)


def load_scalar(text: str, grid: Grid, base_dir: str) -> ScalarField:
    if text.endswith(".csv"):
        return read_field(_resolve(text, base_dir), grid=grid, kind="scalar")
    value = _number(text)
    if value is not None:
        return ScalarField.constant(grid, value)
    return scalar_field(text, grid)


def load_hermitian(text: str, grid: Grid, base_dir: str, g: Optional[HermitianField] = None) -> HermitianField:
    if text == "flat":
        return HermitianField.identity(grid)
    if text.endswith(".csv"):
        return read_field(_resolve(text, base_dir), grid=grid, kind="hermitian")
    value = _number(text)
    if value is not None:
        if g is None:
            return HermitianField.identity(grid, value)
        return HermitianField(grid, value * g.values)
    return hermitian_field(text, grid)


def load_fields(config: ProblemConfig, base_dir: str, lines: Dict[str, int]) -> ProblemFields:
    """
    Builds every field named in the config on its grid.

    Raises:
        ConfigError: Naming the key and line of a field value that cannot be loaded.
    """
    grid = Grid(config.n, config.shape, config.topology)

    def guarded(key, loader, *args):
        text = getattr(config, key)
        if text is None:
            return None
        try:
            return loader(text, grid, base_dir, *args)
        except JeqError as exc:
            raise ConfigError(str(exc), key=key, line=lines.get(key)) from exc

    g = guarded("metric", load_hermitian)
    chi = guarded("chi", load_hermitian, g)
    fields = ProblemFields(
        grid=grid,
        g=g,
        chi=chi,
        psi=guarded("psi", load_scalar),
        usub=guarded("usub", load_scalar),
        phi=guarded("phi", load_scalar),
        u=guarded("u", load_scalar),
    )
    if fields.psi is not None and (fields.psi.values <= 0).any():
        raise ConfigError("psi must be positive", key="psi", line=lines.get("psi"))
    if grid.periodic and fields.phi is not None:
        raise ConfigError("boundary data needs topology = box", key="phi", line=lines.get("phi"))
    return fields


def parse_config(path: str) -> ProblemConfig:
    """
    Reads and validates a problem file, loading every field it names.

    Returns:
        ProblemConfig with defaults filled; ``config.fields`` holds the fields.

    Raises:
        ConfigError: For a malformed line, an unknown, duplicate, missing or
            invalid key, or a field value that cannot be loaded; the error names
            the key and its line.
        IoError: If the file cannot be read.
    """
    values, lines = _read_lines(path)
    if "solver" in values:
        raise ConfigError("solver settings are top-level keys", key="solver", line=lines["solver"])
    solver_keys = [key for key in values if key in SolveConfig.model_fields]
    solver_values = {key: values.pop(key) for key in solver_keys}
    try:
        solver = SolveConfig(**solver_values)
        config = ProblemConfig(**values, solver=solver)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = str(error["loc"][0]) if error["loc"] else None
        raise ConfigError(error["msg"], key=key, line=lines.get(key)) from exc
    base_dir = os.path.dirname(os.path.abspath(path))
    config._fields = load_fields(config, base_dir, lines)
    logger.debug("parsed %s: n=%d shape=%s topology=%s", path, config.n, config.shape, config.topology)
    return config
