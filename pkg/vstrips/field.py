from __future__ import annotations

import copy
import dataclasses as dc
import functools
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ArgumentError,
    FieldOverflowError,
    FieldZeroDivisionError,
    NotPrimeError,
    ParseError,
    ReducibleModulusError,
)

_logger = logging.getLogger(__name__)

# Field elements are plain integers idx = sum(c_i * p^i) over the polynomial basis
Elem = int

MAX_CHARACTERISTIC = 1 << 31
MAX_ORDER = 1 << 63

# Extension fields up to this order get discrete log/exp tables
_TABLE_LIMIT = 1 << 16

# Deterministic Miller-Rabin witnesses for n < 2^64
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Primality test, exact for n < 2^64."""
    if n < 2:
        return False
    for base in _MR_BASES:
        if n % base == 0:
            return n == base
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in _MR_BASES:
        x = pow(base, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power(q: int) -> Tuple[int, int]:
    """Splits a field order into (p, k) with q = p^k.

    Raises:
        NotPrimeError: q is not a prime power.
    """
    if q < 2:
        raise NotPrimeError(f"Not a prime power: {q}")
    if is_prime(q):
        return q, 1
    for k in range(2, q.bit_length() + 1):
        root = round(q ** (1.0 / k))
        for p in (root - 1, root, root + 1):
            if p >= 2 and p**k == q and is_prime(p):
                return p, k
        if root < 2:
            break
    raise NotPrimeError(f"Not a prime power: {q}")


# Dense polynomials over F_p: coefficient lists low-to-high, no trailing zeros.


def _fp_trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a: Sequence[int], m: Sequence[int], p: int) -> List[int]:
    rem = list(a)
    _fp_trim(rem)
    dm = len(m) - 1
    lead_inv = pow(m[-1], p - 2, p)
    while len(rem) - 1 >= dm:
        factor = rem[-1] * lead_inv % p
        shift = len(rem) - 1 - dm
        for i, c in enumerate(m):
            rem[shift + i] = (rem[shift + i] - factor * c) % p
        _fp_trim(rem)
    return rem


def _fp_mulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> List[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _fp_mod(prod, m, p)


def _fp_powmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> List[int]:
    result = [1]
    base = _fp_mod(a, m, p)
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, m, p)
        base = _fp_mulmod(base, base, m, p)
        e >>= 1
    return result


def _fp_gcd(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    x, y = _fp_trim(list(a)), _fp_trim(list(b))
    while y:
        x, y = y, _fp_mod(x, y, p)
    return x


def _fp_sub(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    n = max(len(a), len(b))
    out = [
        ((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
        for i in range(n)
    ]
    return _fp_trim(out)


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Ben-Or test: gcd(T^{p^i} - T, m) = 1 for 1 <= i <= deg(m)/2."""
    k = len(modulus) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    t = [0, 1]
    h = t
    for _ in range(k // 2):
        h = _fp_powmod(h, p, modulus, p)
        if len(_fp_gcd(_fp_sub(h, t, p), modulus, p)) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def smallest_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """Monic irreducible of degree k over F_p whose low coefficients have the smallest encoding.

    Candidates are ordered by sum(c_i * p^i) over (c_0, ..., c_{k-1}), so over F_2
    the cubic T^3 + T + 1 precedes T^3 + T^2 + 1.
    """
    for low in range(1, p**k):
        coeffs = [(low // p**i) % p for i in range(k)]
        if coeffs[0] == 0:
            continue
        modulus = tuple(coeffs) + (1,)
        if is_irreducible(modulus, p):
            return modulus
    raise ReducibleModulusError(f"No irreducible polynomial of degree {k} over F_{p}")


@dc.dataclass
class OpCounter:
    """Monotone counters of field operations."""

    add: int = 0
    mul: int = 0
    inv: int = 0

    @property
    def total(self) -> int:
        return self.add + self.mul + self.inv

    def merge(self, other: OpCounter):
        self.add += other.add
        self.mul += other.mul
        self.inv += other.inv


class Field:
    """Finite field F_q with q = p^k over a polynomial basis."""

    def __init__(
        self,
        p: int,
        k: int = 1,
        modulus: Optional[Sequence[int]] = None,
        counting: bool = False,
    ):
        """Finite field F_{p^k}.

        Args:
            p (int): Prime characteristic, below 2^31.
            k (int, optional): Extension degree. Defaults to 1.
            modulus (Optional[Sequence[int]], optional): Monic irreducible of degree k, coefficients low-to-high. Defaults to the smallest one.
            counting (bool, optional): Record add/mul/inv counts in `counter`. Defaults to False.
        """

        if k < 1:
            raise ArgumentError(f"Extension degree must be positive: {k}")
        if p >= MAX_CHARACTERISTIC:
            raise FieldOverflowError(f"Characteristic too large: {p}")
        if not is_prime(p):
            raise NotPrimeError(f"Not a prime: {p}")
        if p**k >= MAX_ORDER:
            raise FieldOverflowError(f"Field order {p}^{k} exceeds 2^63")

        if modulus is None:
            modulus = smallest_irreducible(p, k) if k > 1 else (0, 1)
            _logger.debug("Selected modulus %s for F_%d^%d", modulus, p, k)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ReducibleModulusError(f"Modulus must be monic of degree {k}: {modulus}")
        if any(not 0 <= c < p for c in modulus):
            raise ReducibleModulusError(f"Modulus coefficients outside F_{p}: {modulus}")
        if not is_irreducible(modulus, p):
            raise ReducibleModulusError(f"Modulus is reducible over F_{p}: {modulus}")

        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self.counter: Optional[OpCounter] = OpCounter() if counting else None

        self._exp: Optional[List[int]] = None
        self._log: Optional[List[int]] = None
        if k > 1 and self.q <= _TABLE_LIMIT:
            self._build_tables()

    @classmethod
    def from_order(cls, q: int, modulus: Optional[Sequence[int]] = None) -> Field:
        """Field of order q (a prime power)."""
        p, k = prime_power(q)
        return cls(p, k, modulus)

    @classmethod
    def parse_spec(cls, text: str) -> Field:
        """Parses a `q p k [m_0 ... m_k]` serialization line."""
        try:
            values = [int(x) for x in text.split()]
        except ValueError as error:
            raise ParseError(f"Invalid field spec: {text!r}") from error
        if len(values) < 3:
            raise ParseError(f"Field spec needs at least q, p, k: {text!r}")
        q, p, k = values[:3]
        modulus = values[3:] or None
        if p**k != q:
            raise ParseError(f"Field spec is inconsistent, {p}^{k} != {q}")
        return cls(p, k, modulus)

    @property
    def tabulated(self) -> bool:
        """Whether multiplication goes through log/exp tables."""
        return self._exp is not None

    @property
    def spec(self) -> str:
        parts = [self.q, self.p, self.k]
        if self.k > 1:
            parts.extend(self.modulus)
        return " ".join(str(x) for x in parts)

    def with_counter(self) -> Field:
        """Copy of this field with fresh operation counters."""
        counted = copy.copy(self)
        counted.counter = OpCounter()
        return counted

    def __reduce__(self):
        return (Field, (self.p, self.k, self.modulus, self.counter is not None))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Field):
            return NotImplemented
        return (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        if self.k == 1:
            return f"Field(GF({self.q}))"
        return f"Field(GF({self.p}^{self.k}), modulus={self.modulus})"

    # Encoding

    def encode(self, digits: Sequence[int]) -> Elem:
        if len(digits) != self.k or any(not 0 <= c < self.p for c in digits):
            raise ArgumentError(f"Invalid basis coefficients for F_{self.q}: {digits}")
        return sum(c * self.p**i for i, c in enumerate(digits))

    def decode(self, a: Elem) -> Tuple[int, ...]:
        return tuple((a // self.p**i) % self.p for i in range(self.k))

    def element(self, a: int) -> Elem:
        """Validated element index."""
        if not 0 <= a < self.q:
            raise ArgumentError(f"Element {a} outside F_{self.q}")
        return a

    # Arithmetic

    def add(self, a: Elem, b: Elem) -> Elem:
        if self.counter is not None:
            self.counter.add += 1
        if self.k == 1:
            s = a + b
            return s - self.p if s >= self.p else s
        if self.p == 2:
            return a ^ b
        return self._combine_digits(a, b, 1)

    def sub(self, a: Elem, b: Elem) -> Elem:
        if self.counter is not None:
            self.counter.add += 1
        if self.k == 1:
            s = a - b
            return s + self.p if s < 0 else s
        if self.p == 2:
            return a ^ b
        return self._combine_digits(a, b, -1)

    def neg(self, a: Elem) -> Elem:
        if self.k == 1:
            return (self.p - a) % self.p
        if self.p == 2:
            return a
        return self._combine_digits(0, a, -1)

    def mul(self, a: Elem, b: Elem) -> Elem:
        if self.counter is not None:
            self.counter.mul += 1
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._exp is not None and self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._mul_poly(a, b)

    def inv(self, a: Elem) -> Elem:
        if a == 0:
            raise FieldZeroDivisionError("Inverse of zero")
        if self.counter is not None:
            self.counter.inv += 1
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        if self._exp is not None and self._log is not None:
            return self._exp[(-self._log[a]) % (self.q - 1)]
        return self._pow_poly(a, self.q - 2)

    def div(self, a: Elem, b: Elem) -> Elem:
        return self.mul(a, self.inv(b))

    def pow(self, a: Elem, e: int) -> Elem:
        """a^e; negative exponents invert first. Charged as its square-and-multiply cost."""
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e == 0:
            return 1
        if self.counter is not None:
            self.counter.mul += e.bit_length() + bin(e).count("1") - 2
        if a == 0:
            return 0
        if self.k == 1:
            return pow(a, e, self.p)
        if self._exp is not None and self._log is not None:
            return self._exp[self._log[a] * e % (self.q - 1)]
        return self._pow_poly(a, e)

    def sample(self, rng: np.random.Generator) -> Elem:
        return int(rng.integers(self.q))

    def _combine_digits(self, a: int, b: int, sign: int) -> int:
        p = self.p
        out, place = 0, 1
        while a or b:
            out += ((a % p + sign * (b % p)) % p) * place
            a //= p
            b //= p
            place *= p
        return out

    def _mul_poly(self, a: int, b: int) -> int:
        prod = _fp_mulmod(self.decode(a), self.decode(b), self.modulus, self.p)
        return sum(c * self.p**i for i, c in enumerate(prod))

    def _pow_poly(self, a: int, e: int) -> int:
        res = _fp_powmod(self.decode(a), e, self.modulus, self.p)
        return sum(c * self.p**i for i, c in enumerate(res))

    def _build_tables(self):
        order = self.q - 1
        for g in range(2, self.q):
            exp = [0] * order
            log = [0] * self.q
            x = 1
            for i in range(order):
                if i > 0 and x == 1:
                    break
                exp[i] = x
                log[x] = i
                x = self._mul_poly(x, g)
            else:
                self._exp, self._log = exp, log
                _logger.debug("Primitive element %d for F_%d", g, self.q)
                return
        # F_2^1 never reaches here; any other field has a primitive element
        raise ReducibleModulusError(f"No primitive element found for F_{self.q}")

    # Vectorised helpers for the batch engine

    @functools.cached_property
    def _tables_array(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._exp is None or self._log is None:
            raise ArgumentError(f"Vectorised arithmetic needs q <= {_TABLE_LIMIT}")
        return np.asarray(self._exp, dtype=np.int64), np.asarray(self._log, dtype=np.int64)

    def mul_array(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Elementwise product of element-index arrays."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if self.k == 1:
            return x * y % self.p
        exp, log = self._tables_array
        out = exp[(log[x] + log[y]) % (self.q - 1)]
        return np.where((x == 0) | (y == 0), 0, out)

    def digit_array(self, x: np.ndarray) -> np.ndarray:
        """Basis coefficients of an element-index array, new trailing axis of length k."""
        x = np.asarray(x, dtype=np.int64)
        places = self.p ** np.arange(self.k, dtype=np.int64)
        return (x[..., None] // places) % self.p

    def undigit_array(self, digits: np.ndarray) -> np.ndarray:
        places = self.p ** np.arange(self.k, dtype=np.int64)
        return (np.asarray(digits, dtype=np.int64) * places).sum(axis=-1)

    @functools.cached_property
    def mul_matrices(self) -> np.ndarray:
        """F_p-matrices of multiplication by each element, shape (q, k, k).

        Entry [c, l, j] is basis coefficient l of c * T^j.
        """
        elems = np.arange(self.q, dtype=np.int64)
        basis = self.p ** np.arange(self.k, dtype=np.int64)
        prods = self.mul_array(elems[:, None], basis[None, :])
        return np.transpose(self.digit_array(prods), (0, 2, 1))


def sample_uniform(field: Field, rng: np.random.Generator) -> Elem:
    """Uniform element of the field, drawn from a seeded numpy stream."""
    return field.sample(rng)
