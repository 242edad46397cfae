"""Vectorised strip evaluation for many polynomials at once.

Specializing F to a strip and evaluating the result at every t are both F_q-linear in the
coefficients of F, so a block of polynomials goes through two matrix products. Over F_p the
products run in float64 (exact while every partial sum stays below 2^53); over F_{p^k} each
element is expanded into its k base-p digits and multiplication by a fixed element becomes a
k x k matrix over F_p.
"""

from __future__ import annotations

import functools
import logging
from typing import Iterator, List, Sequence

import numpy as np

from .field import Elem, Field
from .poly import MultiPoly, dim_space, monomials, specialize
from .roots import all_roots

_logger = logging.getLogger(__name__)

# Polynomials per block
CHUNK = 2048

_FLOAT_EXACT = float(1 << 53)
_VECTOR_MAX_Q = 1 << 12


def vectorised(field: Field) -> bool:
    """Whether the field supports the matrix-product path."""
    if field.q > _VECTOR_MAX_Q:
        return False
    return field.k == 1 or field.tabulated


def _float_exact(field: Field, inner: int) -> bool:
    return inner * field.k * (field.p - 1) ** 2 < _FLOAT_EXACT


def _lift(field: Field, mat: np.ndarray) -> np.ndarray:
    """F_p-matrix of right multiplication by an element matrix, acting on digit rows."""
    n_in, n_out = mat.shape
    k = field.k
    blocks = field.mul_matrices[mat]  # (n_in, n_out, l, j)
    return np.transpose(blocks, (0, 3, 1, 2)).reshape(n_in * k, n_out * k)


def apply(field: Field, rows: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Row-wise products rows @ mat over F_q for element-index arrays."""
    rows = np.asarray(rows, dtype=np.int64)
    mat = np.asarray(mat, dtype=np.int64)
    p = field.p
    if field.k == 1:
        if _float_exact(field, mat.shape[0]):
            out = rows.astype(np.float64) @ mat.astype(np.float64)
            return np.fmod(out, p).astype(np.int64)
        return ((rows.astype(object) @ mat.astype(object)) % p).astype(np.int64)

    m = rows.shape[0]
    digits = field.digit_array(rows).reshape(m, -1)
    lifted = _lift(field, mat)
    out = np.fmod(digits.astype(np.float64) @ lifted.astype(np.float64), p).astype(np.int64)
    return field.undigit_array(out.reshape(m, mat.shape[1], field.k))


@functools.lru_cache(maxsize=64)
def power_table(field: Field, degree: int) -> np.ndarray:
    """Matrix with entry [e, t] = t^e, shape (degree + 1, q)."""
    table = np.zeros((degree + 1, field.q), dtype=np.int64)
    for t in range(field.q):
        table[:, t] = [field.pow(t, e) for e in range(degree + 1)]
    return table


def enumerate_blocks(q: int, dim: int, block: int = CHUNK) -> Iterator[np.ndarray]:
    """Every coefficient vector of F_q^dim in index order, in blocks of rows."""
    total = q**dim
    places = q ** np.arange(dim, dtype=np.int64)
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total), dtype=np.int64)
        yield (idx[:, None] // places) % q


class StripEvaluator:
    """Root counts on vertical strips for blocks of polynomials in F_{r,d}."""

    def __init__(self, field: Field, r: int, d: int):
        self.field = field
        self.r = r
        self.d = d
        self.dim = dim_space(r, d)
        self.exponents = np.asarray(monomials(r, d), dtype=np.int64)
        self.fast = vectorised(field)
        self._matrix = functools.lru_cache(maxsize=512)(self._specialization_matrix)
        if self.fast:
            self.values = power_table(field, d)

    def _specialization_matrix(self, strip: Sequence[Elem]) -> np.ndarray:
        field = self.field
        weights = np.ones(self.dim, dtype=np.int64)
        for j, a in enumerate(strip):
            powers = np.asarray([field.pow(a, e) for e in range(self.d + 1)], dtype=np.int64)
            weights = field.mul_array(weights, powers[self.exponents[:, j]])
        mat = np.zeros((self.dim, self.d + 1), dtype=np.int64)
        mat[np.arange(self.dim), self.exponents[:, -1]] = weights
        return mat

    def specialize(self, coeffs: np.ndarray, strip: Sequence[Elem]) -> np.ndarray:
        """Coefficients of F(a, T), one row per polynomial, shape (m, d + 1)."""
        return apply(self.field, coeffs, self._matrix(tuple(strip)))

    def root_counts(self, coeffs: np.ndarray, strip: Sequence[Elem]) -> np.ndarray:
        """Number of t with F(a, t) = 0 for each row (q for an identically zero restriction)."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if not self.fast:
            return np.asarray(self._scalar_counts(coeffs, strip), dtype=np.int64)
        values = apply(self.field, self.specialize(coeffs, strip), self.values)
        return (values == 0).sum(axis=1)

    def _scalar_counts(self, coeffs: np.ndarray, strip: Sequence[Elem]) -> List[int]:
        out = []
        for row in coeffs:
            poly = MultiPoly(self.field, self.r, self.d, tuple(int(c) for c in row))
            out.append(all_roots(specialize(poly, tuple(strip)), self.field).count(self.field))
        return out
