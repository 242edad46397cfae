"""Brute-force ground truth on small instances.

Single-polynomial quantities scan F_q^r point by point with the scalar arithmetic of
`vstrips.poly`. Averages over all of F_{r,d} enumerate every coefficient vector in blocks
and count roots with the vectorised strip evaluator.
"""

from __future__ import annotations

import dataclasses as dc
import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from ._batch import StripEvaluator, apply, enumerate_blocks, power_table, vectorised
from .analytics import d_j, kappa
from .errors import ArgumentError, GuardExceededError, ZeroLeadingError
from .field import Elem, Field
from .poly import MultiPoly, Point, Strip, UniPoly, dim_space, monomials, specialize, uni_eval
from .svs import StripSequence, strip_count, strip_from_index

_logger = logging.getLogger(__name__)


@dc.dataclass(frozen=True)
class EnumGuard:
    """Cap on the number of states an enumeration may visit."""

    max_states: int = 1 << 30

    def check(self, states: int, what: str = "enumeration"):
        if states > self.max_states:
            raise GuardExceededError(f"{what} needs {states} states, guard allows {self.max_states}")


DEFAULT_GUARD = EnumGuard()


# Single polynomials


def _strip_roots(poly: MultiPoly, guard: EnumGuard) -> Dict[Strip, List[Elem]]:
    field = poly.field
    guard.check(field.q**poly.r, "zero set scan")
    out = {}
    for strip in itertools.product(range(field.q), repeat=poly.r - 1):
        f = specialize(poly, strip)
        out[strip] = [t for t in range(field.q) if uni_eval(field, f, t) == 0]
    return out


def zero_set(poly: MultiPoly, guard: EnumGuard = DEFAULT_GUARD) -> FrozenSet[Point]:
    """Z(F), the zeros of F in F_q^r."""
    return frozenset(
        strip + (t,) for strip, roots in _strip_roots(poly, guard).items() for t in roots
    )


def n_of(poly: MultiPoly, guard: EnumGuard = DEFAULT_GUARD) -> int:
    return len(zero_set(poly, guard))


def vs_of(poly: MultiPoly, guard: EnumGuard = DEFAULT_GUARD) -> FrozenSet[Strip]:
    """VS(F), the strips carrying at least one zero."""
    return frozenset(strip for strip, roots in _strip_roots(poly, guard).items() if roots)


def ns_of(poly: MultiPoly, guard: EnumGuard = DEFAULT_GUARD) -> int:
    return len(vs_of(poly, guard))


def n_strip(poly: MultiPoly, strip: Sequence[Elem], guard: EnumGuard = DEFAULT_GUARD) -> int:
    """N_a(F), the number of zeros on the strip {a} x F_q."""
    field = poly.field
    guard.check(field.q, "strip scan")
    f = specialize(poly, tuple(strip))
    return sum(1 for t in range(field.q) if uni_eval(field, f, t) == 0)


def output_probabilities(poly: MultiPoly, guard: EnumGuard = DEFAULT_GUARD) -> Dict[Point, Fraction]:
    """Exact chance P_{x,F} = 1/(NS(F) N_a(F)) that SVS outputs each zero x = (a, t)."""
    roots = {strip: ts for strip, ts in _strip_roots(poly, guard).items() if ts}
    ns = len(roots)
    return {
        strip + (t,): Fraction(1, ns * len(ts)) for strip, ts in roots.items() for t in ts
    }


def exact_entropy(poly: MultiPoly, guard: EnumGuard = DEFAULT_GUARD) -> float:
    """Shannon entropy H_F of the SVS output distribution, in nats."""
    return -sum(float(p) * math.log(p) for p in output_probabilities(poly, guard).values())


def value_set_card(f: UniPoly, field: Field, guard: EnumGuard = DEFAULT_GUARD) -> int:
    """|V(f)|, the size of {f(c) : c in F_q}."""
    guard.check(field.q, "value set scan")
    return len({uni_eval(field, f, t) for t in range(field.q)})


# Value set averages


def _value_set_sizes(field: Field, coeffs: np.ndarray) -> np.ndarray:
    degree = coeffs.shape[1] - 1
    if vectorised(field):
        values = np.sort(apply(field, coeffs, power_table(field, degree)), axis=1)
        return 1 + (np.diff(values, axis=1) != 0).sum(axis=1)
    return np.asarray(
        [value_set_card(UniPoly(tuple(int(c) for c in row)), field, EnumGuard(field.q)) for row in coeffs],
        dtype=np.int64,
    )


def _family(field: Field, d: int, j: int, prefix: Sequence[Elem]) -> Tuple[int, np.ndarray]:
    if not 1 <= j <= d:
        raise ArgumentError(f"Need 1 <= j <= d, got j={j}, d={d}")
    if len(prefix) != j:
        raise ArgumentError(f"Prefix needs {j} coefficients, got {len(prefix)}")
    if prefix[0] == 0:
        raise ZeroLeadingError("Leading coefficient a_d must be nonzero")
    for c in prefix:
        field.element(c)
    # prefix runs a_d, a_{d-1}, ...; rows store coefficients low-to-high
    return d + 1 - j, np.asarray(list(reversed(prefix)), dtype=np.int64)


def avg_value_set(
    field: Field,
    d: int,
    j: int,
    prefix: Sequence[Elem],
    guard: EnumGuard = DEFAULT_GUARD,
) -> Fraction:
    """Exact mean of |V(f)| over all degree-d f whose j leading coefficients equal `prefix`."""
    free, high = _family(field, d, j, prefix)
    guard.check(field.q ** (free + 1), "value set average")
    total = 0
    for low in enumerate_blocks(field.q, free):
        rows = np.hstack([low, np.broadcast_to(high, (low.shape[0], j))])
        total += int(_value_set_sizes(field, rows).sum())
    return Fraction(total, field.q**free)


@dc.dataclass(frozen=True)
class SampledAverage:
    mean: float
    stderr: float
    samples: int


def sampled_value_set(
    field: Field,
    d: int,
    j: int,
    prefix: Sequence[Elem],
    samples: int,
    rng: np.random.Generator,
    block: int = 1 << 14,
) -> SampledAverage:
    """Monte Carlo estimate of `avg_value_set` for families too large to enumerate."""
    if samples < 2:
        raise ArgumentError(f"Need at least two samples, got {samples}")
    free, high = _family(field, d, j, prefix)
    sizes = []
    for start in range(0, samples, block):
        m = min(block, samples - start)
        low = rng.integers(0, field.q, size=(m, free))
        rows = np.hstack([low, np.broadcast_to(high, (m, j))])
        sizes.append(_value_set_sizes(field, rows))
    values = np.concatenate(sizes).astype(np.float64)
    return SampledAverage(float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples)), samples)


# Averages over all of F_{r,d}


def _count_blocks(field: Field, r: int, d: int, guard: EnumGuard):
    """Yields (coefficient block, root count matrix of shape (m, q^(r-1)))."""
    dim = dim_space(r, d)
    guard.check(field.q**dim, f"F_{{{r},{d}}} over F_{field.q}")
    evaluator = StripEvaluator(field, r, d)
    strips = [strip_from_index(field, r, i) for i in range(strip_count(field, r))]
    for block in enumerate_blocks(field.q, dim):
        counts = np.stack([evaluator.root_counts(block, strip) for strip in strips], axis=1)
        yield block, counts


def entropy_from_counts(counts: np.ndarray) -> np.ndarray:
    """H_F per row of a root count matrix: sum over nonempty strips of log(NS N_a) / NS."""
    counts = np.asarray(counts, dtype=np.int64)
    ns = (counts > 0).sum(axis=1)
    safe_ns = np.maximum(ns, 1)[:, None]
    terms = np.where(counts > 0, np.log(np.maximum(counts, 1) * safe_ns) / safe_ns, 0.0)
    return terms.sum(axis=1)


def enumerate_prob_c1(field: Field, r: int, d: int, guard: EnumGuard = DEFAULT_GUARD) -> Fraction:
    """Exact P[C = 1]: mean of NS(F) / q^(r-1) over every F in F_{r,d}."""
    total = sum(int((counts > 0).sum()) for _, counts in _count_blocks(field, r, d, guard))
    return Fraction(total, strip_count(field, r) * field.q ** dim_space(r, d))


def enumerate_prob_cs(
    field: Field,
    r: int,
    d: int,
    strips: Sequence[Strip],
    guard: EnumGuard = DEFAULT_GUARD,
) -> List[Fraction]:
    """Exact distribution of C_a for a fixed strip sequence; entry s-1 holds p[C_a = s]."""
    sequence = strips if isinstance(strips, StripSequence) else StripSequence(tuple(strips))
    dim = dim_space(r, d)
    guard.check(field.q**dim, f"F_{{{r},{d}}} over F_{field.q}")
    evaluator = StripEvaluator(field, r, d)
    hits = [0] * len(sequence)
    for block in enumerate_blocks(field.q, dim):
        active = np.ones(block.shape[0], dtype=bool)
        for s, strip in enumerate(sequence):
            found = active & (evaluator.root_counts(block, strip) > 0)
            hits[s] += int(found.sum())
            active &= ~found
    return [Fraction(h, field.q**dim) for h in hits]


def mean_ns(field: Field, r: int, d: int, guard: EnumGuard = DEFAULT_GUARD) -> Fraction:
    total = sum(int((counts > 0).sum()) for _, counts in _count_blocks(field, r, d, guard))
    return Fraction(total, field.q ** dim_space(r, d))


def var_ns(field: Field, r: int, d: int, guard: EnumGuard = DEFAULT_GUARD) -> Fraction:
    first = 0
    second = 0
    for _, counts in _count_blocks(field, r, d, guard):
        ns = (counts > 0).sum(axis=1).astype(object)
        first += int(ns.sum())
        second += int((ns * ns).sum())
    size = field.q ** dim_space(r, d)
    return Fraction(second, size) - Fraction(first, size) ** 2


def mean_zeros(field: Field, r: int, d: int, guard: EnumGuard = DEFAULT_GUARD) -> Fraction:
    """Mean of N(F) over F_{r,d}; equals q^(r-1)."""
    total = sum(int(counts.sum()) for _, counts in _count_blocks(field, r, d, guard))
    return Fraction(total, field.q ** dim_space(r, d))


def exact_avg_entropy(field: Field, r: int, d: int, guard: EnumGuard = DEFAULT_GUARD) -> float:
    """Mean of H_F over every F in F_{r,d}."""
    total = math.fsum(
        float(h) for _, counts in _count_blocks(field, r, d, guard) for h in entropy_from_counts(counts)
    )
    return total / field.q ** dim_space(r, d)


# Rank checks


def rank(field: Field, rows: Sequence[Sequence[Elem]]) -> int:
    """Rank over F_q by Gaussian elimination with first-nonzero pivoting."""
    mat = [list(row) for row in rows]
    if not mat:
        return 0
    n_cols = len(mat[0])
    rank_ = 0
    for col in range(n_cols):
        pivot = next((i for i in range(rank_, len(mat)) if mat[i][col]), None)
        if pivot is None:
            continue
        mat[rank_], mat[pivot] = mat[pivot], mat[rank_]
        inv = field.inv(mat[rank_][col])
        mat[rank_] = [field.mul(x, inv) for x in mat[rank_]]
        for i in range(rank_ + 1, len(mat)):
            factor = mat[i][col]
            if factor:
                mat[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(mat[i], mat[rank_])]
        rank_ += 1
        if rank_ == len(mat):
            break
    return rank_


def _monomial_value(field: Field, point: Sequence[Elem], exponents: Sequence[int]) -> Elem:
    value = 1
    for a, e in zip(point, exponents):
        if e:
            value = field.mul(value, field.pow(a, e))
    return value


def _checked_strips(strips: Sequence[Strip], r: int) -> StripSequence:
    sequence = strips if isinstance(strips, StripSequence) else StripSequence(tuple(strips))
    if any(len(strip) != r - 1 for strip in sequence):
        raise ArgumentError(f"Strips must have length {r - 1}")
    return sequence


def vandermonde_generic(strips: Sequence[Strip], r: int, d: int, field: Field) -> bool:
    """Whether every multivariate Vandermonde block M_j, j <= kappa_s, has full rank min(D_j, s)."""
    sequence = _checked_strips(strips, r)
    s = len(sequence)
    if not 1 <= s <= d_j(d, r):
        raise ArgumentError(f"Need 1 <= s <= D_d={d_j(d, r)}, got s={s}")
    for j in range(1, kappa(s, r) + 1):
        basis = monomials(r - 1, j)
        mat = [[_monomial_value(field, a, omega) for omega in basis] for a in sequence]
        if rank(field, mat) < min(d_j(j, r), s):
            _logger.debug("Block M_%d drops rank for %s", j, sequence.strips)
            return False
    return True


def phi_matrix_rank(strips: Sequence[Strip], r: int, d: int, field: Field) -> int:
    """Rank of F -> (F(a_1, T), ..., F(a_s, T)) as an s(d+1) x D matrix over F_q."""
    sequence = _checked_strips(strips, r)
    exps = monomials(r, d)
    rows = []
    for a in sequence:
        for e in range(d + 1):
            rows.append(
                [_monomial_value(field, a, omega[:-1]) if omega[-1] == e else 0 for omega in exps]
            )
    return rank(field, rows)


def ns_counts(poly: MultiPoly, guard: Optional[EnumGuard] = None) -> Dict[Strip, int]:
    """N_a(F) for every strip a."""
    return {strip: len(ts) for strip, ts in _strip_roots(poly, guard or DEFAULT_GUARD).items()}
