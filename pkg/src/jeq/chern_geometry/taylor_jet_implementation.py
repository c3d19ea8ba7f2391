"""Truncated power series in (z_1..z_n, zbar_1..zbar_n) about a base point.

A TaylorJet stores the coefficients of every monomial z^a zbar^b with total
degree at most ``degree`` in its last axis; leading axes are a batch (for
example the n x n entries of a metric). ``order`` is the degree up to which the
coefficients are exact: products keep the smaller order of their factors and a
derivative lowers it by one. Coefficients above ``order`` are always zero.
"""

import functools
import itertools
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse

from jeq.errors import InsufficientOrder


class JetStructure:
    """
    Monomial bookkeeping shared by every jet with the same variable count and degree.

    Attributes:
        nvars: Number of variables (2n: z first, then zbar).
        degree: Largest stored total degree.
        exps: (M, nvars) exponent table, sorted by total degree; row 0 is the constant.
        degrees: (M,) total degree per monomial.
        factorials: (M,) product of factorials of the exponents.
        ia, ib: (P,) monomial index pairs whose product has degree <= degree.
        product: (M, P) sparse matrix summing pair products into their monomial.
        conj_perm: (M,) index of the monomial with z and zbar exponents swapped.
    """

    def __init__(self, nvars: int, degree: int):
        self.nvars = nvars
        self.degree = degree
        rows = [
            e for d in range(degree + 1)
            for e in sorted(_compositions(d, nvars), reverse=True)
        ]
        self.exps = np.array(rows, dtype=np.int64).reshape(len(rows), nvars)
        self.degrees = self.exps.sum(axis=1)
        self.size = len(rows)
        self.factorials = np.array(
            [math.prod(math.factorial(int(a)) for a in e) for e in self.exps], dtype=float
        )
        self._base = degree + 1
        self._keys = self._encode(self.exps)
        self._sorter = np.argsort(self._keys)
        self.index: Dict[Tuple[int, ...], int] = {tuple(int(a) for a in e): k for k, e in enumerate(self.exps)}

        # every pair (a, b) with deg a + deg b <= degree
        total = self.degrees[:, None] + self.degrees[None, :]
        ia, ib = np.nonzero(total <= degree)
        self.ia = ia
        self.ib = ib
        target = self.lookup(self.exps[ia] + self.exps[ib])
        self.product = scipy.sparse.csr_matrix(
            (np.ones(len(ia)), (target, np.arange(len(ia)))), shape=(self.size, len(ia))
        )

        half = nvars // 2
        swapped = np.concatenate([self.exps[:, half:], self.exps[:, :half]], axis=1)
        self.conj_perm = self.lookup(swapped)
        self._derivative_maps: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def _encode(self, exps: np.ndarray) -> np.ndarray:
        weights = self._base ** np.arange(self.nvars, dtype=np.int64)
        return exps @ weights

    def lookup(self, exps: np.ndarray) -> np.ndarray:
        """Maps exponent rows to monomial indices."""
        keys = self._encode(np.asarray(exps, dtype=np.int64))
        pos = np.searchsorted(self._keys, keys, sorter=self._sorter)
        return self._sorter[pos]

    def derivative_map(self, var: int):
        """Returns (src, dst, factor) so that d/dvar moves coeffs[src] * factor to dst."""
        if var not in self._derivative_maps:
            src = np.nonzero(self.exps[:, var] > 0)[0]
            lowered = self.exps[src].copy()
            lowered[:, var] -= 1
            dst = self.lookup(lowered)
            factor = self.exps[src, var].astype(float)
            self._derivative_maps[var] = (src, dst, factor)
        return self._derivative_maps[var]


def _compositions(total: int, parts: int) -> Iterable[Tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        bounds = (-1,) + cuts + (total + parts - 1,)
        yield tuple(bounds[k + 1] - bounds[k] - 1 for k in range(parts))


@functools.lru_cache(maxsize=None)
def jet_structure(nvars: int, degree: int) -> JetStructure:
    return JetStructure(nvars, degree)


class TaylorJet:
    """
    A (batch of) truncated power series in z and zbar.

    Args:
        coeffs: Complex array with the monomial axis last.
        n: Complex dimension (the jet has 2n variables).
        degree: Stored degree, selecting the shared JetStructure.
        order: Degree up to which coefficients are exact (defaults to degree).
    """

    # numpy defers mixed arithmetic to the reflected jet operators
    __array_ufunc__ = None

    def __init__(self, coeffs, n: int, degree: int, order: Optional[int] = None):
        self.n = n
        self.degree = degree
        self.order = degree if order is None else min(order, degree)
        self.structure = jet_structure(2 * n, degree)
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape[-1] != self.structure.size:
            raise ValueError(f"expected {self.structure.size} coefficients, got {coeffs.shape[-1]}")
        if self.order < degree:
            coeffs = np.where(self.structure.degrees > self.order, 0.0, coeffs)
        self.coeffs = coeffs

    # --- construction ---

    @classmethod
    def constant(cls, value, n: int, degree: int) -> "TaylorJet":
        value = np.asarray(value, dtype=np.complex128)
        coeffs = np.zeros(value.shape + (jet_structure(2 * n, degree).size,), dtype=np.complex128)
        coeffs[..., 0] = value
        return cls(coeffs, n, degree)

    @classmethod
    def variable(cls, var: int, n: int, degree: int, value: complex = 0.0) -> "TaylorJet":
        """The coordinate jet value + w_var, with var < n holomorphic and var >= n antiholomorphic."""
        structure = jet_structure(2 * n, degree)
        coeffs = np.zeros(structure.size, dtype=np.complex128)
        coeffs[0] = value
        unit = [0] * (2 * n)
        unit[var] = 1
        coeffs[structure.index[tuple(unit)]] = 1.0
        return cls(coeffs, n, degree)

    def _like(self, coeffs, order: Optional[int] = None) -> "TaylorJet":
        return TaylorJet(coeffs, self.n, self.degree, self.order if order is None else order)

    def _coerce(self, other) -> "TaylorJet":
        if isinstance(other, TaylorJet):
            if other.n != self.n or other.degree != self.degree:
                raise ValueError("jets live on different structures")
            return other
        return TaylorJet.constant(other, self.n, self.degree)

    # --- shape ---

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.coeffs.shape[:-1]

    def __getitem__(self, key) -> "TaylorJet":
        return self._like(self.coeffs[key])

    def transpose(self, *axes: int) -> "TaylorJet":
        axes = tuple(axes) + (len(self.shape),)
        return self._like(np.transpose(self.coeffs, axes))

    # --- arithmetic ---

    def __add__(self, other) -> "TaylorJet":
        other = self._coerce(other)
        return self._like(self.coeffs + other.coeffs, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self) -> "TaylorJet":
        return self._like(-self.coeffs)

    def __sub__(self, other) -> "TaylorJet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TaylorJet":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TaylorJet":
        if not isinstance(other, TaylorJet):
            return self._like(self.coeffs * np.asarray(other, dtype=np.complex128)[..., None])
        other = self._coerce(other)
        s = self.structure
        pairs = self.coeffs[..., s.ia] * other.coeffs[..., s.ib]
        return self._like(_collect(s, pairs), min(self.order, other.order))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TaylorJet":
        if not isinstance(other, TaylorJet):
            return self * (1.0 / np.asarray(other, dtype=np.complex128))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "TaylorJet":
        return self.reciprocal() * other

    def __pow__(self, k: int) -> "TaylorJet":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = TaylorJet.constant(np.ones(self.shape), self.n, self.degree)
        for _ in range(k):
            result = result * self
        return result

    def contract(self, subscripts: str, other: "TaylorJet") -> "TaylorJet":
        """
        Einstein summation over batch axes with jet multiplication, e.g.
        ``ginv.contract('kl,ijl->kij', dG)``.
        """
        other = self._coerce(other)
        left, out = subscripts.replace(" ", "").split("->")
        a, b = left.split(",")
        s = self.structure
        pairs = np.einsum(f"{a}Z,{b}Z->{out}Z", self.coeffs[..., s.ia], other.coeffs[..., s.ib])
        return self._like(_collect(s, pairs), min(self.order, other.order))

    def sum(self, axis) -> "TaylorJet":
        axis = axis if isinstance(axis, tuple) else (axis,)
        axis = tuple(a if a >= 0 else a - 1 for a in axis)
        return self._like(np.sum(self.coeffs, axis=axis))

    # --- calculus ---

    def conj(self) -> "TaylorJet":
        """Complex conjugate as a function: swaps z and zbar exponents."""
        return self._like(np.conj(self.coeffs[..., self.structure.conj_perm]))

    def _differentiate(self, var: int) -> "TaylorJet":
        if self.order < 1:
            raise InsufficientOrder(f"cannot differentiate a jet of order {self.order}")
        src, dst, factor = self.structure.derivative_map(var)
        coeffs = np.zeros_like(self.coeffs)
        coeffs[..., dst] = self.coeffs[..., src] * factor
        return self._like(coeffs, self.order - 1)

    def d(self, i: int) -> "TaylorJet":
        """Holomorphic derivative d/dz_i."""
        return self._differentiate(i)

    def dbar(self, j: int) -> "TaylorJet":
        """Antiholomorphic derivative d/dzbar_j."""
        return self._differentiate(self.n + j)

    def gradient(self) -> "TaylorJet":
        """Stacks d/dz_i along a new leading axis."""
        return stack_jets([self.d(i) for i in range(self.n)])

    def gradient_bar(self) -> "TaylorJet":
        return stack_jets([self.dbar(j) for j in range(self.n)])

    def value(self) -> np.ndarray:
        """Value at the base point."""
        return self.coeffs[..., 0]

    def derivative(self, exponents: Sequence[int]) -> np.ndarray:
        """
        Returns d^a/dz^a d^b/dzbar^b at the base point for exponents (a, b).

        Raises:
            InsufficientOrder: If the requested degree exceeds the jet order.
        """
        exponents = tuple(int(e) for e in exponents)
        if sum(exponents) > self.order:
            raise InsufficientOrder(f"derivative of degree {sum(exponents)} from a jet of order {self.order}")
        k = self.structure.index[exponents]
        return self.coeffs[..., k] * self.structure.factorials[k]

    def truncate(self, order: int) -> "TaylorJet":
        return self._like(self.coeffs, min(order, self.order))

    def restrict(self, degree: int) -> "TaylorJet":
        """Re-expresses the jet on the smaller structure of the given degree."""
        if degree > self.degree:
            raise ValueError("restrict can only lower the stored degree")
        target = jet_structure(2 * self.n, degree)
        idx = self.structure.lookup(target.exps)
        return TaylorJet(self.coeffs[..., idx], self.n, degree, min(self.order, degree))

    # --- analytic functions ---

    def apply(self, derivatives: Callable[[np.ndarray, int], List[np.ndarray]]) -> "TaylorJet":
        """
        Composes an analytic function with the jet.

        Args:
            derivatives: Called as derivatives(a0, k) and returning the list
                [f(a0), f'(a0), ..., f^(k)(a0)] for the base values a0.
        """
        a0 = self.value()
        h = self - a0
        coeff = derivatives(a0, self.order)
        result = TaylorJet.constant(coeff[0], self.n, self.degree)
        power = TaylorJet.constant(np.ones(self.shape), self.n, self.degree)
        for k in range(1, self.order + 1):
            power = power * h
            result = result + power * (coeff[k] / math.factorial(k))
        return result.truncate(self.order)

    def exp(self) -> "TaylorJet":
        return self.apply(lambda a, k: [np.exp(a)] * (k + 1))

    def sin(self) -> "TaylorJet":
        return self.apply(lambda a, k: [_sin_cycle(a, m) for m in range(k + 1)])

    def cos(self) -> "TaylorJet":
        return self.apply(lambda a, k: [_sin_cycle(a, m + 1) for m in range(k + 1)])

    def log(self) -> "TaylorJet":
        return self.apply(
            lambda a, k: [np.log(a)] + [(-1) ** (m - 1) * math.factorial(m - 1) / a ** m for m in range(1, k + 1)]
        )

    def reciprocal(self) -> "TaylorJet":
        return self.apply(lambda a, k: [(-1) ** m * math.factorial(m) / a ** (m + 1) for m in range(k + 1)])

    def __repr__(self) -> str:
        return f"TaylorJet(n={self.n}, degree={self.degree}, order={self.order}, shape={self.shape})"


def _sin_cycle(a: np.ndarray, m: int) -> np.ndarray:
    return [np.sin(a), np.cos(a), -np.sin(a), -np.cos(a)][m % 4]


def _collect(structure: JetStructure, pairs: np.ndarray) -> np.ndarray:
    """Sums pair products (last axis P) into monomial coefficients (last axis M)."""
    batch = pairs.shape[:-1]
    flat = pairs.reshape(-1, pairs.shape[-1])
    out = structure.product @ flat.T
    return np.asarray(out).T.reshape(batch + (structure.size,))


def stack_jets(jets: Sequence[TaylorJet], axis: int = 0) -> TaylorJet:
    """Stacks jets along a new batch axis."""
    first = jets[0]
    axis = axis if axis >= 0 else axis - 1
    order = min(j.order for j in jets)
    return TaylorJet(np.stack([j.coeffs for j in jets], axis=axis), first.n, first.degree, order)


def inverse_matrix(G: TaylorJet) -> TaylorJet:
    """
    Inverse of a jet-valued matrix (batch axes (..., n, n)) by a Neumann series
    about its base value.
    """
    G0 = G.value()
    X = np.linalg.inv(G0)
    Xjet = TaylorJet.constant(X, G.n, G.degree)
    N = G - G0
    step = -(Xjet.contract("...ij,...jk->...ik", N))
    result = Xjet
    term = Xjet
    for _ in range(G.order):
        term = step.contract("...ij,...jk->...ik", term)
        result = result + term
    return result.truncate(G.order)

