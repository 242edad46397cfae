"""Closed-form predictions for the number of strips SVS searches.

Identities are evaluated in exact rationals (`fractions.Fraction`); asymptotic bounds are
returned as floats; terms like d^(d+5) and 1/d! are formed in log space and saturate at inf or 0.
"""

from __future__ import annotations

import dataclasses as dc
import functools
import logging
import math
import sys
from fractions import Fraction
from typing import NamedTuple

from .errors import ArgumentError, HypothesisError, OutOfRangeError
from .poly import dim_space

_logger = logging.getLogger(__name__)

CMPP = "cmpp"
MPP = "mpp"
VARIANTS = (CMPP, MPP)

# Beyond this degree mu_d agrees with 1 - 1/e to double precision
_MU_EXACT_LIMIT = 40

_LOG_MAX = math.log(sys.float_info.max)


def _exp(x: float) -> float:
    """exp saturating at inf instead of raising OverflowError."""
    return math.exp(x) if x < _LOG_MAX else math.inf


def _require_q_above_d(q: int, d: int):
    if q <= d:
        raise HypothesisError(f"Need q > d, got q={q}, d={d}")


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ArgumentError(f"Unknown variant {variant!r}, expected one of {VARIANTS}")


@functools.lru_cache(maxsize=None)
def mu(d: int) -> Fraction:
    """mu_d = sum_{j=1..d} (-1)^(j-1) / j!, the limiting chance a random degree-d polynomial has a root."""
    if d < 1:
        raise ArgumentError(f"Need d >= 1, got {d}")
    total = Fraction(0)
    for j in range(1, d + 1):
        total += Fraction((-1) ** (j - 1), math.factorial(j))
    return total


def mu_float(d: int) -> float:
    """Float mu_d, also for degrees far too large for the exact sum."""
    if d <= _MU_EXACT_LIMIT:
        return float(mu(d))
    tail = (-1) ** (d + 1) * _exp(-math.lgamma(d + 2))
    return 1 - math.exp(-1) + tail


def p_hat(s: int, d: int) -> Fraction:
    """Geometric prediction (1 - mu_d)^(s-1) mu_d for exactly s searches."""
    if s < 1:
        raise ArgumentError(f"Need s >= 1, got {s}")
    m = mu(d)
    return (1 - m) ** (s - 1) * m


def prob_c1_exact(q: int, d: int) -> Fraction:
    """Exact probability that a fixed strip of a uniform F in F_{r,d} carries a zero (independent of r)."""
    _require_q_above_d(q, d)
    total = Fraction(0)
    for j in range(1, d + 1):
        total += Fraction((-1) ** (j - 1) * math.comb(q, j), q**j)
    total += Fraction((-1) ** d * math.comb(q - 1, d), q ** (d + 1))
    return total


def two_strip_joint(q: int, d: int) -> Fraction:
    """Fraction of F in F_{r,d} with zeros on both of two fixed distinct strips."""
    p1 = prob_c1_exact(q, d)
    return p1**2 + Fraction((q - 1) * math.comb(q - 1, d) ** 2, q ** (2 * d + 2))


def p_exact_c2(q: int, d: int) -> Fraction:
    """Probability that the first of two fixed strips is empty and the second is not."""
    return prob_c1_exact(q, d) - two_strip_joint(q, d)


# Strip-space combinatorics


def d_j(j: int, r: int) -> int:
    """D_j = C(j+r-1, r-1), the number of monomials of degree <= j in r-1 variables; D_{-1} = 0."""
    if j < 0:
        return 0
    return math.comb(j + r - 1, r - 1)


def kappa(i: int, r: int) -> int:
    """Unique j with D_{j-1} < i <= D_j."""
    if i < 1:
        raise ArgumentError(f"Need i >= 1, got {i}")
    if r < 2:
        raise ArgumentError(f"Need r >= 2, got {r}")
    j = 0
    while d_j(j, r) < i:
        j += 1
    return j


def s_star(r: int, d: int, variant: str = CMPP) -> int:
    """Largest s covered by the distribution bounds; d/2 is read as floor(d/2)."""
    _check_variant(variant)
    if variant == CMPP:
        return math.comb(d // 2 + r - 1, r - 1)
    return math.comb(d + r - 3, r - 1)


def dim_im_phi(s: int, r: int, d: int) -> int:
    """Dimension of the image of F -> (F(a_1, T), ..., F(a_s, T)) for generic distinct strips."""
    k = kappa(s, r)
    if k > d:
        raise OutOfRangeError(f"s={s} exceeds D_d={d_j(d, r)} for r={r}, d={d}")
    closed = math.comb(k - 1 + r, r) + s * (d - k + 1)
    summed = sum(d + 1 - kappa(i, r) for i in range(1, s + 1))
    assert closed == summed, f"dim Im(Phi) mismatch: {closed} != {summed}"
    return closed


@dc.dataclass(frozen=True)
class BoundReport:
    """Main term with an error radius, tagged with the estimate that produced it."""

    center: float
    radius: float
    variant: str

    def __post_init__(self):
        if self.radius < 0:
            raise ArgumentError(f"Negative radius: {self.radius}")

    @property
    def low(self) -> float:
        return self.center - self.radius

    @property
    def high(self) -> float:
        return self.center + self.radius

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


def prob_cs_bound(q: int, d: int, s: int, variant: str = CMPP, r: int = 2) -> BoundReport:
    """Error bound on p[C_a = s] around the geometric law for fixed generic strips.

    Raises:
        HypothesisError: q <= d, s outside [1, s_star], or the mpp variant in characteristic 2.
    """
    _check_variant(variant)
    _require_q_above_d(q, d)
    top = s_star(r, d, variant)
    if not 1 <= s <= top:
        raise HypothesisError(f"s={s} outside [1, {top}] for the {variant} estimate")

    root = math.sqrt(d)
    if variant == CMPP:
        spread = float(d - 2) ** 5 * _exp(2 * root - (d - 1) * math.log(2))
        radius = (math.exp(-1) + spread + 1) / q + 14 / q**2
    else:
        if q % 2 == 0:
            raise HypothesisError("The mpp estimate needs odd characteristic")
        radius = d**2 * _exp(d * math.log(2)) / math.sqrt(q) + (
            266 * _exp((d + 5) * math.log(d) + 2 * root - d) + 1
        ) / q
    return BoundReport(float(p_hat(s, d)), radius, variant)


def tail_prob(s_star: int, d: int) -> float:
    """(1 - mu_d)^(s*), the main term of p[C_a > s*]."""
    if s_star < 0:
        raise ArgumentError(f"Need s* >= 0, got {s_star}")
    return float((1 - mu(d)) ** s_star)


# Statistics of NS(F), the number of strips carrying a zero


def ns_mean(q: int, r: int, d: int) -> Fraction:
    """Exact mean of NS(F) over F_{r,d}."""
    _require_q_above_d(q, d)
    qq = Fraction(q)
    total = Fraction(0)
    for k in range(1, d + 1):
        total += (-1) ** (k - 1) * math.comb(q, k) * qq ** (r - 1 - k)
    total += (-1) ** d * math.comb(q - 1, d) * qq ** (r - d - 2)
    assert total == q ** (r - 1) * prob_c1_exact(q, d)
    return total


def ns_variance_leading(q: int, r: int, d: int) -> float:
    """Two leading terms q^(2r-3)/(d!)^2 + mu_d (1 - mu_d) q^(r-1) of the variance of NS."""
    _require_q_above_d(q, d)
    m = mu_float(d)
    lead = _exp((2 * r - 3) * math.log(q) - 2 * math.lgamma(d + 1))
    return lead + m * (1 - m) * _exp((r - 1) * math.log(q))


def chebyshev_A_bound(alpha: float, q: int, r: int, d: int) -> float:
    """Bound on the fraction of F with NS(F) <= (1 - alpha) times the mean of NS."""
    if not 0 < alpha < 1:
        raise OutOfRangeError(f"alpha must lie in (0, 1), got {alpha}")
    m = mu_float(d)
    first = _exp(-2 * (math.log(alpha * m) + math.lgamma(d + 1)) - math.log(q))
    second = (1 - m) / (alpha**2 * m) * _exp((1 - r) * math.log(q))
    return first + second


def expected_searches_bound(r: int, d: int) -> float:
    """Strip-count factor of the average-case cost (tau excluded), main term only."""
    if r < 2 or d < 2:
        raise ArgumentError(f"Need r >= 2 and d >= 2, got r={r}, d={d}")
    m = mu_float(d)
    if r > 2:
        top = s_star(r, d, CMPP)
        return 1 / m + d * _exp(top * math.log1p(-1 / d))
    top = d // 2 + 1
    alpha = 1 - 1 / math.sqrt(top)
    variance = (1 - m) / m + _exp(-2 * math.lgamma(d + 1)) / m**2
    return variance / alpha**2 + 1 / m + _exp((top + 1) * math.log1p(-m / math.sqrt(top)))


def cost_model_tau(d: int, r: int, q: int, c: float = 1.0) -> float:
    """Field multiplications for one strip search: D + c d log2 q."""
    return dim_space(r, d) + c * d * math.log2(q)


def expected_cost_bound(d: int, r: int, q: int, c: float = 1.0) -> float:
    return cost_model_tau(d, r, q, c) * expected_searches_bound(r, d)


class EntropyBounds(NamedTuple):
    ideal_upper: float
    svs_lower_coeff: float


def entropy_bounds(q: int, r: int, d: int) -> EntropyBounds:
    """log q^(r-1) bounds the ideal entropy; SVS reaches at least 1/(2 mu_d) of it asymptotically."""
    return EntropyBounds((r - 1) * math.log(q), 1 / (2 * mu_float(d)))


def valueset_bounds(q: int, d: int, j: int, variant: str = CMPP) -> BoundReport:
    """Estimate of the average value set size with j leading coefficients fixed.

    Raises:
        HypothesisError: j outside the variant's range, or mpp in characteristic 2.
    """
    _check_variant(variant)
    root = math.sqrt(d)
    if variant == CMPP:
        if not 1 <= j <= d // 2 - 1:
            raise HypothesisError(f"j={j} outside [1, {d // 2 - 1}] for the cmpp estimate")
        spread = float(d - 2) ** 5 * _exp(2 * root - (d - 2) * math.log(2))
        radius = math.exp(-1) / 2 + spread + 7 / q
    else:
        if not 1 <= j <= d - 3:
            raise HypothesisError(f"j={j} outside [1, {d - 3}] for the mpp estimate")
        if q % 2 == 0:
            raise HypothesisError("The mpp estimate needs odd characteristic")
        radius = d**2 * _exp((d - 1) * math.log(2)) * math.sqrt(q) + 133 * _exp(
            (d + 5) * math.log(d) + 2 * root - d
        )
    return BoundReport(mu_float(d) * q, radius, variant)


def bad_set_bound(s: int, r: int, d: int, q: int, main_term: bool = False) -> float:
    """Bound on the chance that s uniform strips make some Vandermonde block M_j singular.

    Sums, over j = 1..kappa_s, the deviation (delta-1)(delta-2) q^-3/2 + 5 delta^(13/3) q^-2 of the
    determinant hypersurface count, with delta = j D_j. With `main_term` the share q^-1 of tuples
    on the hypersurface is added per block, giving a bound on the probability itself.
    """
    top = kappa(s, r)
    if top > d:
        raise OutOfRangeError(f"s={s} exceeds D_d={d_j(d, r)} for r={r}, d={d}")
    total = 0.0
    for j in range(1, top + 1):
        delta = float(j * d_j(j, r))
        if main_term:
            total += 1 / q
        total += (delta - 1) * (delta - 2) * q**-1.5 + 5 * delta ** (13 / 3) / q**2
    return total
