"""Uniform periodic and box grids over R^{2n}, discrete complex Hessians, fields and diagnostics."""

from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField
from jeq.torus_discretization.complex_hessian_implementation import (
    apply_real_operator,
    complex_gradient,
    complex_hessian,
    operator_diagonal,
    real_operator_coefficients,
)
from jeq.torus_discretization.residual_field_implementation import (
    donaldson_class_margin,
    gfrak_field,
    residual_field,
)
from jeq.torus_discretization.diagnostics_implementation import (
    Diagnostics,
    chern_laplacian,
    diagnostics,
    gradient_squared,
    mean_zero,
)
from jeq.torus_discretization.field_io_implementation import read_field, write_field
from jeq.torus_discretization.expression_implementation import (
    evaluate_scalar,
    exact_complex_hessian,
    hermitian_field,
    parse_expression,
    scalar_field,
)
