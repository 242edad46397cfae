from __future__ import annotations

import dataclasses as dc
import logging
from typing import List, Optional, Tuple

import numpy as np

from .errors import ArgumentError, RootFindingError
from .field import Elem, Field
from .poly import (
    ONE,
    T,
    UniPoly,
    uni_add,
    uni_divmod,
    uni_eval,
    uni_gcd,
    uni_monic,
    uni_mulmod,
    uni_powmod,
    uni_sub,
)

_logger = logging.getLogger(__name__)

# Fields up to this order are scanned point by point instead of split
DIRECT_SCAN_LIMIT = 4096

# Splitting gives up after this many rounds per unit of degree
_ROUNDS_PER_DEGREE = 64


@dc.dataclass(frozen=True)
class RootSet:
    """Distinct F_q-roots of a univariate polynomial, sorted by element index.

    `full_line` marks the zero polynomial, for which every element is a root and `roots` stays empty.
    """

    roots: Tuple[Elem, ...] = ()
    full_line: bool = False

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(sorted(set(self.roots))))
        if self.full_line and self.roots:
            raise ArgumentError("A full-line root set lists no explicit roots")

    def count(self, field: Field) -> int:
        return field.q if self.full_line else len(self.roots)

    def __bool__(self) -> bool:
        return self.full_line or bool(self.roots)

    def choose(self, field: Field, rng: np.random.Generator) -> Optional[Elem]:
        """Uniform element of the set, None when it is empty."""
        if self.full_line:
            return field.sample(rng)
        if not self.roots:
            return None
        return self.roots[int(rng.integers(len(self.roots)))]


def frobenius_gcd(f: UniPoly, field: Field) -> UniPoly:
    """Monic gcd(f, T^q - T): the product of (T - t) over the distinct roots t of f in F_q.

    Returns the zero polynomial exactly when f is zero.
    """
    if f.is_zero:
        return f
    if f.deg == 0:
        return ONE
    if f.deg == 1:
        return uni_monic(field, f)
    h = uni_powmod(field, T, field.q, f)
    return uni_gcd(field, f, uni_sub(field, h, T))


def _splitter(h: UniPoly, field: Field, rng: np.random.Generator) -> UniPoly:
    if field.p != 2:
        delta = field.sample(rng)
        w = uni_powmod(field, UniPoly((delta, 1)), (field.q - 1) // 2, h)
        return uni_sub(field, w, ONE)

    # Tr(cT) = sum of (cT)^(2^i), i < k; takes values in F_2 on the roots
    c = 1 + int(rng.integers(field.q - 1))
    term = uni_divmod(field, UniPoly((0, c)), h)[1]
    acc = term
    for _ in range(field.k - 1):
        term = uni_mulmod(field, term, term, h)
        acc = uni_add(field, acc, term)
    return acc


def _split_roots(g: UniPoly, field: Field, rng: np.random.Generator) -> List[Elem]:
    """Roots of a monic squarefree g that splits into linear factors over F_q."""
    roots: List[Elem] = []
    budget = _ROUNDS_PER_DEGREE * max(g.deg, 1)
    rounds = 0
    stack = [g]
    while stack:
        h = stack.pop()
        if h.deg < 1:
            continue
        if h.deg == 1:
            roots.append(field.neg(h.coeffs[0]))
            continue
        while True:
            rounds += 1
            if rounds > budget:
                raise RootFindingError(f"No split of a degree {g.deg} factor after {budget} rounds")
            u = uni_gcd(field, h, _splitter(h, field, rng))
            if 0 < u.deg < h.deg:
                stack.append(u)
                stack.append(uni_divmod(field, h, u)[0])
                break
    _logger.debug("Split degree %d in %d rounds", g.deg, rounds)
    return roots


def all_roots(
    f: UniPoly,
    field: Field,
    rng: Optional[np.random.Generator] = None,
    scan_limit: int = DIRECT_SCAN_LIMIT,
) -> RootSet:
    """Complete set of F_q-roots of f.

    Args:
        f (UniPoly): Polynomial, possibly zero.
        field (Field): Coefficient field.
        rng (Optional[np.random.Generator], optional): Randomness for equal-degree splitting; the result does not depend on it. Defaults to None.
        scan_limit (int, optional): Largest field order handled by direct scan. Defaults to DIRECT_SCAN_LIMIT.

    Returns:
        RootSet: Sorted distinct roots, or the full line for the zero polynomial.
    """

    if f.is_zero:
        return RootSet(full_line=True)
    if f.deg == 0:
        return RootSet()

    if field.q <= scan_limit:
        return RootSet(tuple(t for t in range(field.q) if uni_eval(field, f, t) == 0))

    g = frobenius_gcd(f, field)
    if g.deg < 1:
        return RootSet()
    return RootSet(tuple(_split_roots(g, field, rng or np.random.default_rng())))


def sample_root(
    f: UniPoly,
    field: Field,
    rng: np.random.Generator,
    scan_limit: int = DIRECT_SCAN_LIMIT,
) -> Optional[Elem]:
    """Uniform root of f (uniform over F_q when f is zero), None when f has no F_q-root."""
    return all_roots(f, field, rng, scan_limit).choose(field, rng)
