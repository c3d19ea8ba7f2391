"""Small expression grammar for fields given in closed form.

Scalar expressions are sums and products of numbers, the grid coordinates
x1..xn, y1..yn, pi and the functions sin, cos and exp (``^`` is accepted as a
power). Hermitian expressions may add terms ``c * ddbar(f)``: the exact complex
Hessian of the scalar expression f, times a scalar coefficient; the remaining
scalar part multiplies the identity. ``2.0 + ddbar(0.05*sin(2*pi*x1))`` is the
form chi = 2 omega + 0.05 ddbar sin(2 pi x_1).
"""

import functools
import re
from typing import List, Tuple

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from jeq.errors import ExpressionError
from jeq.torus_discretization.grid_implementation import Grid, HermitianField, ScalarField

FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp, "pi": sympy.pi}
DDBAR = sympy.Function("ddbar")
IDENTIFIER = re.compile(r"(?<![0-9.])[A-Za-z_][A-Za-z_0-9]*")
ALLOWED_CHARACTERS = re.compile(r"^[A-Za-z0-9_+\-*/^().,\s]*$")


@functools.lru_cache(maxsize=None)
def coordinate_symbols(n: int) -> Tuple[sympy.Symbol, ...]:
    """(x1..xn, y1..yn) as real sympy symbols."""
    return sympy.symbols(" ".join([f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)]), real=True)


def parse_expression(text: str, n: int, allow_ddbar: bool = False) -> sympy.Expr:
    """
    Parses an expression over the grid coordinates.

    Raises:
        ExpressionError: For characters or names outside the grammar, or unparsable text.
    """
    if not ALLOWED_CHARACTERS.match(text):
        raise ExpressionError(f"expression '{text}' contains characters outside the grammar")
    symbols = coordinate_symbols(n)
    names = {str(s): s for s in symbols}
    names.update(FUNCTIONS)
    if allow_ddbar:
        names["ddbar"] = DDBAR
    for token in IDENTIFIER.findall(text):
        if token not in names:
            raise ExpressionError(f"unknown name '{token}' in expression '{text}'")
    try:
        expr = parse_expr(
            text,
            local_dict=names,
            transformations=standard_transformations + (convert_xor,),
        )
    except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as exc:
        raise ExpressionError(f"cannot parse expression '{text}': {exc}") from exc
    if not isinstance(expr, sympy.Expr):
        raise ExpressionError(f"expression '{text}' is not a scalar expression")
    return expr


def evaluate_scalar(expr: sympy.Expr, grid: Grid) -> np.ndarray:
    """Evaluates a scalar sympy expression at every grid point."""
    symbols = coordinate_symbols(grid.n)
    func = sympy.lambdify(symbols, expr, "numpy")
    values = np.asarray(func(*grid.coordinates), dtype=float)
    return np.broadcast_to(values, grid.shape).copy()


def symbolic_complex_hessian(expr: sympy.Expr, n: int) -> List[List[sympy.Expr]]:
    """1/4 [(f_{x_i x_j} + f_{y_i y_j}) + i (f_{x_i y_j} - f_{y_i x_j})] as sympy entries."""
    s = coordinate_symbols(n)
    x, y = s[:n], s[n:]
    return [
        [
            sympy.Rational(1, 4) * (
                sympy.diff(expr, x[i], x[j]) + sympy.diff(expr, y[i], y[j])
                + sympy.I * (sympy.diff(expr, x[i], y[j]) - sympy.diff(expr, y[i], x[j]))
            )
            for j in range(n)
        ]
        for i in range(n)
    ]


def exact_complex_hessian(expr: sympy.Expr, grid: Grid) -> np.ndarray:
    """The complex Hessian of expr at every grid point, shape grid.shape + (n, n)."""
    n = grid.n
    entries = symbolic_complex_hessian(expr, n)
    out = np.empty(grid.shape + (n, n), dtype=np.complex128)
    symbols = coordinate_symbols(n)
    for i in range(n):
        for j in range(n):
            func = sympy.lambdify(symbols, entries[i][j], "numpy")
            out[..., i, j] = np.broadcast_to(np.asarray(func(*grid.coordinates), dtype=np.complex128), grid.shape)
    return out


def scalar_field(text: str, grid: Grid) -> ScalarField:
    return ScalarField(grid, evaluate_scalar(parse_expression(text, grid.n), grid))


def hermitian_field(text: str, grid: Grid) -> HermitianField:
    """
    Evaluates ``a + sum_k c_k * ddbar(f_k)`` as a Hermitian field.

    Raises:
        ExpressionError: If a ddbar term enters non-linearly or its coefficient
            is not real.
    """
    expr = parse_expression(text, grid.n, allow_ddbar=True)
    terms = sorted(expr.atoms(DDBAR), key=str)
    scalar_part = expr.subs({t: 0 for t in terms})
    values = evaluate_scalar(scalar_part, grid)[..., None, None] * np.eye(grid.n)
    for term in terms:
        coeff = sympy.diff(expr, term)
        if coeff.atoms(DDBAR) or len(term.args) != 1:
            raise ExpressionError(f"'{term}' must enter '{text}' linearly with one argument")
        if coeff.has(sympy.I):
            raise ExpressionError(f"coefficient of '{term}' must be real")
        values = values + evaluate_scalar(coeff, grid)[..., None, None] * exact_complex_hessian(term.args[0], grid)
    return HermitianField(grid, values)
