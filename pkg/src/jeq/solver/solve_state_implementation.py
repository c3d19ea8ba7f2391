from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField


class SolveConfig(BaseModel):
    """Newton, line-search and Krylov tunables. Every field can be set from a problem file."""
    model_config = ConfigDict(extra="forbid")

    max_newton_iters: int = Field(default=50, gt=0)
    newton_tol: float = Field(default=1e-10, ge=1e-13)
    armijo_factor: float = Field(default=0.5, gt=0, lt=1)
    min_step: float = Field(default=2.0 ** -20, gt=0, le=1)
    krylov_tol: float = Field(default=1e-10, gt=0)
    krylov_max_iters: int = Field(default=4000, gt=0)
    krylov_restart: int = Field(default=60, gt=0)
    continuity_steps: int = Field(default=4, gt=0)
    positivity_floor: float = Field(default=1e-8, gt=0)
    subsolution_rtol: float = Field(default=0.0, ge=0)


class StepRecord(BaseModel):
    """One accepted Newton step, as written to the convergence log."""
    iter: int
    residual: float
    step: float
    margin: float
    krylov_iters: int


class SolveState(BaseModel):
    """
    A Newton iterate.

    Attributes:
        u: The potential (mean zero on periodic grids, equal to the data on box faces).
        c: The unknown right-hand constant tr(gfrak^{-1} g) = c of the closed problem.
        residual_norm: Sup norm of the residual over the points where the equation is posed.
        positivity_margin: Smallest eigenvalue of gfrak relative to g over the same points.
        step_history: Accepted steps, oldest first.
        path: Continuity parameters t solved so far (empty for a direct solve).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    u: ScalarField
    c: Optional[float] = None
    residual_norm: float
    positivity_margin: float
    step_history: List[StepRecord] = Field(default_factory=list)
    path: List[float] = Field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.step_history)

    def log_records(self) -> List[dict]:
        return [record.model_dump() for record in self.step_history]


class Problem:
    """
    The data of one J-equation solve.

    Closed problems (periodic grid) have no psi: the constant c = n/psi is an
    unknown. Dirichlet problems (box grid) carry psi and the boundary data phi,
    whose values are used on the faces.
    """

    def __init__(
        self,
        chi: HermitianField,
        g: HermitianField,
        psi: Optional[ScalarField] = None,
        phi: Optional[ScalarField] = None,
    ):
        if chi.grid != g.grid:
            raise ValueError(f"chi and g live on different grids: {chi.grid!r} vs {g.grid!r}")
        if chi.grid.periodic and phi is not None:
            raise ValueError("boundary data needs a box grid")
        if not chi.grid.periodic and (psi is None or phi is None):
            raise ValueError("a Dirichlet problem needs psi and boundary data")
        self.chi = chi
        self.g = g
        self.psi = psi
        self.phi = phi

    @property
    def grid(self) -> Grid:
        return self.chi.grid

    @property
    def closed(self) -> bool:
        return self.grid.periodic

    @property
    def equation_mask(self) -> np.ndarray:
        return self.grid.interior_mask

    def with_psi(self, psi: ScalarField) -> "Problem":
        return Problem(self.chi, self.g, psi, self.phi)

    def rhs(self, c: Optional[float] = None) -> ScalarField:
        """n/psi as a field; the closed problem uses psi = n/c."""
        if self.closed:
            return ScalarField.constant(self.grid, self.grid.n / c)
        return self.psi

    def __repr__(self) -> str:
        kind = "closed" if self.closed else "dirichlet"
        return f"Problem({kind}, {self.grid!r})"


class EstimateReport(BaseModel):
    """
    Quantities from the a priori estimates evaluated on a solved state.

    Attributes:
        C0: Oscillation of u.
        epsilon: Bound with epsilon g <= chi + Hess usub <= g / epsilon.
        theta, bigN: Constants of the linearized-operator lower bound.
        testfn_grad_max: Max of exp(A_grad exp(eta)) |grad u|^2 with eta = usub - u.
        testfn_hess_max: Max of exp(exp(A_hess eta)) W with eta = usub - u + sup(u - usub).
        lemma_points: Number of points with W >= bigN.
        lemma_margin_min: Min over those points of tr(F (chi + Hess usub)) - (n + theta)/psi;
            None when no point qualifies.
        trace_bound_gap_min: Min of tr(gfrak^{-1} chi_usub) - epsilon tr(gfrak^{-1} g).
        f_trace_max: Max of tr(F g).
        f_trace_gap_min: Min of (tr gfrak^{-1} g)^2 - tr(F g).
    """
    C0: float = Field(ge=0)
    grad_max: float
    lap_max: float
    W_max: float
    boundary_grad_max: Optional[float] = None
    boundary_lap_max: Optional[float] = None
    residual_norm: float
    epsilon: float
    theta: float
    bigN: float
    A_grad: float
    A_hess: float
    testfn_grad_max: float
    testfn_grad_max_location: List[int]
    testfn_hess_max: float
    testfn_hess_max_location: List[int]
    lemma_points: int
    lemma_margin_min: Optional[float] = None
    trace_bound_gap_min: float
    f_trace_max: float
    f_trace_gap_min: float
    rhs_squared_max: float

    def report(self) -> dict:
        return self.model_dump()

