from __future__ import annotations

import dataclasses as dc
import functools
import logging
import math
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, TextIO, Tuple

import numpy as np

from .errors import (
    ArgumentError,
    DimensionMismatchError,
    FieldZeroDivisionError,
    OutOfRangeError,
    ParseError,
)
from .field import Elem, Field

_logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Strip = Tuple[Elem, ...]
Point = Tuple[Elem, ...]

# Degree reported for the zero univariate polynomial
ZERO_DEGREE = -1

_POLY_HEADER = "POLY"


def dim_space(r: int, d: int) -> int:
    """Dimension D = C(d+r, r) of the space F_{r,d} of r-variate polynomials of degree <= d."""
    if r < 1 or d < 0:
        raise ArgumentError(f"Need r >= 1 and d >= 0, got r={r}, d={d}")
    return math.comb(d + r, r)


def _grade(r: int, g: int) -> Iterator[Exponents]:
    # Exponent vectors of total degree g, first exponent descending
    if r == 1:
        yield (g,)
        return
    for first in range(g, -1, -1):
        for rest in _grade(r - 1, g - first):
            yield (first,) + rest


@functools.lru_cache(maxsize=None)
def monomials(r: int, d: int) -> Tuple[Exponents, ...]:
    """Exponent vectors of degree <= d in graded-lex order (X_1 > X_2 > ... within a grade)."""
    dim_space(r, d)
    return tuple(e for g in range(d + 1) for e in _grade(r, g))


def monomial_rank(exponents: Sequence[int], d: Optional[int] = None) -> int:
    """Position of a monomial in graded-lex order; independent of the degree bound.

    Raises:
        OutOfRangeError: Negative exponent, or total degree above d when d is given.
    """
    e = tuple(exponents)
    r = len(e)
    if r == 0 or any(x < 0 for x in e):
        raise OutOfRangeError(f"Invalid exponent vector: {e}")
    g = sum(e)
    if d is not None and g > d:
        raise OutOfRangeError(f"Monomial {e} has degree {g} > {d}")

    rank = math.comb(g - 1 + r, r)
    remaining = g
    for i, x in enumerate(e[:-1]):
        tail = r - i - 1
        # monomials sharing the prefix but with a larger exponent here come first
        for y in range(x + 1, remaining + 1):
            rank += math.comb(remaining - y + tail - 1, tail - 1)
        remaining -= x
    return rank


def monomial_unrank(index: int, r: int, d: int) -> Exponents:
    table = monomials(r, d)
    if not 0 <= index < len(table):
        raise OutOfRangeError(f"Monomial index {index} outside [0, {len(table)})")
    return table[index]


@dc.dataclass(frozen=True)
class MultiPoly:
    """Dense element of F_{r,d}, coefficients indexed by graded-lex monomial rank."""

    field: Field
    r: int
    d: int
    coeffs: Tuple[Elem, ...]

    def __post_init__(self):
        if self.r < 2:
            raise ArgumentError(f"Need at least two variables, got r={self.r}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        expected = dim_space(self.r, self.d)
        if len(self.coeffs) != expected:
            raise DimensionMismatchError(
                f"Expected {expected} coefficients for r={self.r}, d={self.d}, got {len(self.coeffs)}"
            )
        if any(not 0 <= c < self.field.q for c in self.coeffs):
            raise ArgumentError(f"Coefficients outside F_{self.field.q}")

    @classmethod
    def from_terms(
        cls,
        field: Field,
        r: int,
        d: int,
        terms: Mapping[Sequence[int], int],
    ) -> MultiPoly:
        """Builds a polynomial from {exponents: coefficient}; coefficients are reduced into the field."""
        coeffs = [0] * dim_space(r, d)
        for exponents, c in terms.items():
            if len(exponents) != r:
                raise DimensionMismatchError(f"Exponent vector {tuple(exponents)} is not of length {r}")
            idx = monomial_rank(exponents, d)
            coeffs[idx] = field.add(coeffs[idx], _reduce(field, c))
        return cls(field, r, d, tuple(coeffs))

    @classmethod
    def zero(cls, field: Field, r: int, d: int) -> MultiPoly:
        return cls(field, r, d, (0,) * dim_space(r, d))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def degree(self) -> int:
        """Actual total degree; ZERO_DEGREE for the zero polynomial."""
        top = ZERO_DEGREE
        for e, c in zip(monomials(self.r, self.d), self.coeffs):
            if c:
                top = max(top, sum(e))
        return top

    def terms(self) -> Iterator[Tuple[Exponents, Elem]]:
        """Nonzero terms in graded-lex order."""
        for e, c in zip(monomials(self.r, self.d), self.coeffs):
            if c:
                yield e, c

    def coeff(self, exponents: Sequence[int]) -> Elem:
        return self.coeffs[monomial_rank(exponents, self.d)]


def _reduce(field: Field, c: int) -> Elem:
    # Integers are read as elements of the prime field when negative or k == 1
    if field.k == 1:
        return c % field.p
    if c < 0:
        return field.neg(field.element(-c % field.p))
    return field.element(c)


def _powers(field: Field, a: Elem, n: int) -> List[Elem]:
    out = [1]
    for _ in range(n):
        out.append(field.mul(out[-1], a))
    return out


def sample_poly(field: Field, r: int, d: int, rng: np.random.Generator) -> MultiPoly:
    """Uniformly random element of F_{r,d}: i.i.d. uniform coefficients."""
    coeffs = rng.integers(0, field.q, size=dim_space(r, d))
    return MultiPoly(field, r, d, tuple(int(c) for c in coeffs))


def evaluate(poly: MultiPoly, x: Sequence[Elem]) -> Elem:
    """Value of the polynomial at a point of F_q^r."""
    if len(x) != poly.r:
        raise DimensionMismatchError(f"Point of length {len(x)} for r={poly.r}")
    field = poly.field
    powers = [_powers(field, xi, poly.d) for xi in x]
    total = 0
    for e, c in poly.terms():
        term = c
        for j, ej in enumerate(e):
            if ej:
                term = field.mul(term, powers[j][ej])
        total = field.add(total, term)
    return total


def specialize(poly: MultiPoly, strip: Sequence[Elem]) -> UniPoly:
    """Restriction F(a, T) of the polynomial to the vertical strip {a} x F_q."""
    if len(strip) != poly.r - 1:
        raise DimensionMismatchError(f"Strip of length {len(strip)} for r={poly.r}")
    field = poly.field
    powers = [_powers(field, a, poly.d) for a in strip]
    out = [0] * (poly.d + 1)
    for e, c in poly.terms():
        term = c
        for j in range(poly.r - 1):
            if e[j]:
                term = field.mul(term, powers[j][e[j]])
        out[e[-1]] = field.add(out[e[-1]], term)
    return UniPoly(tuple(out))


@dc.dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial over F_q, coefficients low-to-high without trailing zeros."""

    coeffs: Tuple[Elem, ...] = ()

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        end = len(coeffs)
        while end and coeffs[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coeffs", coeffs[:end])

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Elem:
        return self.coeffs[-1] if self.coeffs else 0

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return " + ".join(
            f"{c}*T^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c
        )


ONE = UniPoly((1,))
T = UniPoly((0, 1))


def uni_eval(field: Field, f: UniPoly, t: Elem) -> Elem:
    acc = 0
    for c in reversed(f.coeffs):
        acc = field.add(field.mul(acc, t), c)
    return acc


def uni_add(field: Field, f: UniPoly, g: UniPoly) -> UniPoly:
    n = max(len(f.coeffs), len(g.coeffs))
    a = f.coeffs + (0,) * (n - len(f.coeffs))
    b = g.coeffs + (0,) * (n - len(g.coeffs))
    return UniPoly(tuple(field.add(x, y) for x, y in zip(a, b)))


def uni_sub(field: Field, f: UniPoly, g: UniPoly) -> UniPoly:
    n = max(len(f.coeffs), len(g.coeffs))
    a = f.coeffs + (0,) * (n - len(f.coeffs))
    b = g.coeffs + (0,) * (n - len(g.coeffs))
    return UniPoly(tuple(field.sub(x, y) for x, y in zip(a, b)))


def uni_scale(field: Field, f: UniPoly, c: Elem) -> UniPoly:
    return UniPoly(tuple(field.mul(x, c) for x in f.coeffs))


def uni_mul(field: Field, f: UniPoly, g: UniPoly) -> UniPoly:
    if f.is_zero or g.is_zero:
        return UniPoly()
    out = [0] * (len(f.coeffs) + len(g.coeffs) - 1)
    for i, x in enumerate(f.coeffs):
        if x:
            for j, y in enumerate(g.coeffs):
                if y:
                    out[i + j] = field.add(out[i + j], field.mul(x, y))
    return UniPoly(tuple(out))


def uni_divmod(field: Field, f: UniPoly, g: UniPoly) -> Tuple[UniPoly, UniPoly]:
    """Quotient and remainder of f by g.

    Raises:
        FieldZeroDivisionError: g is the zero polynomial.
    """
    if g.is_zero:
        raise FieldZeroDivisionError("Division by the zero polynomial")
    rem = list(f.coeffs)
    dg = g.deg
    if len(rem) - 1 < dg:
        return UniPoly(), f
    lead_inv = field.inv(g.lead)
    quot = [0] * (len(rem) - dg)
    for shift in range(len(rem) - 1 - dg, -1, -1):
        factor = field.mul(rem[shift + dg], lead_inv)
        if not factor:
            continue
        quot[shift] = factor
        for i, c in enumerate(g.coeffs):
            if c:
                rem[shift + i] = field.sub(rem[shift + i], field.mul(factor, c))
    return UniPoly(tuple(quot)), UniPoly(tuple(rem[:dg]))


def uni_monic(field: Field, f: UniPoly) -> UniPoly:
    if f.is_zero or f.lead == 1:
        return f
    return uni_scale(field, f, field.inv(f.lead))


def uni_gcd(field: Field, f: UniPoly, g: UniPoly) -> UniPoly:
    """Monic gcd; gcd(0, g) = monic(g) and gcd(0, 0) = 0."""
    while not g.is_zero:
        f, g = g, uni_divmod(field, f, g)[1]
    return uni_monic(field, f)


def uni_mulmod(field: Field, f: UniPoly, g: UniPoly, m: UniPoly) -> UniPoly:
    return uni_divmod(field, uni_mul(field, f, g), m)[1]


def uni_powmod(field: Field, base: UniPoly, e: int, m: UniPoly) -> UniPoly:
    """base^e mod m by square-and-multiply.

    Raises:
        FieldZeroDivisionError: m is the zero polynomial.
    """
    if m.is_zero:
        raise FieldZeroDivisionError("Zero modulus")
    if e < 0:
        raise ArgumentError(f"Negative exponent: {e}")
    result = uni_divmod(field, ONE, m)[1]
    base = uni_divmod(field, base, m)[1]
    while e:
        if e & 1:
            result = uni_mulmod(field, result, base, m)
        e >>= 1
        if e:
            base = uni_mulmod(field, base, base, m)
    return result


# Text formats


def dump_poly(poly: MultiPoly, stream: TextIO):
    """Writes the `POLY q p k r d` header and one `coeff e_1 ... e_r` line per nonzero term."""
    field = poly.field
    stream.write(f"{_POLY_HEADER} {field.q} {field.p} {field.k} {poly.r} {poly.d}\n")
    for e, c in poly.terms():
        stream.write(" ".join(str(x) for x in (c,) + e) + "\n")


def load_poly(stream: TextIO, field: Optional[Field] = None) -> MultiPoly:
    """Reads the text format; terms may come in any order but not repeat.

    Args:
        stream (TextIO): Text handle.
        field (Optional[Field], optional): Field to validate the header against; built from the header when omitted. Defaults to None.

    Returns:
        MultiPoly: Parsed polynomial.
    """

    lines = [
        line.split("#", 1)[0].strip() for line in stream.read().splitlines()
    ]
    lines = [line for line in lines if line]
    if not lines:
        raise ParseError("Empty polynomial file")

    header = lines[0].split()
    if len(header) != 6 or header[0] != _POLY_HEADER:
        raise ParseError(f"Expected '{_POLY_HEADER} q p k r d' header, got {lines[0]!r}")
    try:
        q, p, k, r, d = (int(x) for x in header[1:])
    except ValueError as error:
        raise ParseError(f"Non-integer header field in {lines[0]!r}") from error

    if k < 1 or q != p**k:
        raise ParseError(f"Header field is inconsistent, {p}^{k} != {q}")
    if field is None:
        field = Field(p, k)
    elif (field.q, field.p, field.k) != (q, p, k):
        raise ParseError(f"Header field {q} {p} {k} does not match {field.spec}")

    terms: Dict[Exponents, int] = {}
    for line in lines[1:]:
        try:
            values = [int(x) for x in line.split()]
        except ValueError as error:
            raise ParseError(f"Non-integer term line: {line!r}") from error
        if len(values) != r + 1:
            raise ParseError(f"Term line needs {r + 1} integers: {line!r}")
        c, e = values[0], tuple(values[1:])
        if not 0 <= c < field.q:
            raise ParseError(f"Coefficient {c} outside F_{field.q}")
        if any(x < 0 for x in e) or sum(e) > d:
            raise ParseError(f"Exponents {e} invalid for degree bound {d}")
        if e in terms:
            raise ParseError(f"Duplicate exponent vector {e}")
        terms[e] = c

    return MultiPoly.from_terms(field, r, d, terms)


def parse_inline(
    text: str,
    field: Field,
    r: Optional[int] = None,
    d: Optional[int] = None,
) -> MultiPoly:
    """Parses `coeff:e_1,...,e_r` terms separated by whitespace, e.g. "1:1,1 2:0,0" for X_1 X_2 - 1 over F_3.

    Coefficients are element indices; r defaults to the exponent vector length and d to the largest term degree.
    """

    terms: Dict[Exponents, int] = {}
    for token in text.split():
        coeff_text, sep, exp_text = token.partition(":")
        if not sep:
            raise ParseError(f"Expected coeff:exponents, got {token!r}")
        try:
            c = int(coeff_text)
            e = tuple(int(x) for x in exp_text.split(","))
        except ValueError as error:
            raise ParseError(f"Non-integer value in term {token!r}") from error
        if r is None:
            r = len(e)
        if len(e) != r:
            raise ParseError(f"Term {token!r} does not have {r} exponents")
        if e in terms:
            raise ParseError(f"Duplicate exponent vector {e}")
        terms[e] = c

    if r is None:
        raise ParseError("Cannot infer the number of variables from an empty polynomial")
    if d is None:
        d = max((sum(e) for e in terms), default=0)
    if any(sum(e) > d for e in terms):
        raise ParseError(f"Term degree exceeds the bound d={d}")
    return MultiPoly.from_terms(field, r, d, terms)


def format_inline(poly: MultiPoly) -> str:
    return " ".join(f"{c}:{','.join(str(x) for x in e)}" for e, c in poly.terms())
