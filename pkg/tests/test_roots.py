import math
from collections import Counter
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vstrips.errors import ArgumentError
from vstrips.field import Field
from vstrips.poly import ONE, UniPoly, uni_mul
from vstrips.roots import DIRECT_SCAN_LIMIT, RootSet, all_roots, frobenius_gcd, sample_root


def _from_roots(field: Field, roots, extra: UniPoly = ONE) -> UniPoly:
    factors = [UniPoly((field.neg(a), 1)) for a in roots]
    return reduce(lambda f, g: uni_mul(field, f, g), factors, extra)


def test_zero_and_constant(f7: Field):
    zero = all_roots(UniPoly(), f7)
    assert zero.full_line
    assert zero.count(f7) == 7
    assert zero

    constant = all_roots(UniPoly((3,)), f7)
    assert not constant
    assert constant.count(f7) == 0


def test_root_set_invariants(f7: Field, rng: np.random.Generator):
    assert RootSet((3, 1, 3)).roots == (1, 3)
    assert RootSet().choose(f7, rng) is None
    with pytest.raises(ArgumentError):
        RootSet((1,), full_line=True)


def test_scan(f7: Field):
    # (T - 1)(T - 3)^2 (T^2 + 1), and T^2 + 1 has no root mod 7
    f = _from_roots(f7, [1, 3, 3], UniPoly((1, 0, 1)))
    assert all_roots(f, f7).roots == (1, 3)


def test_frobenius_gcd(f7: Field):
    f = _from_roots(f7, [1, 3, 3], UniPoly((1, 0, 1)))
    assert frobenius_gcd(f, f7) == _from_roots(f7, [1, 3])
    assert frobenius_gcd(UniPoly((1, 0, 1)), f7) == ONE
    assert frobenius_gcd(UniPoly(), f7).is_zero


@pytest.mark.parametrize("q", [7, 9, 16, 8192, 10007])
def test_split_matches_scan(q: int, rng: np.random.Generator):
    field = Field.from_order(q)
    roots = sorted({0, 1, q - 1, q // 2, q // 3})
    f = _from_roots(field, roots + roots[:2])
    assert all_roots(f, field, rng, scan_limit=0).roots == tuple(roots)
    if q <= 8192:
        assert all_roots(f, field, rng).roots == tuple(roots)


def test_split_rootless_large(rng: np.random.Generator):
    field = Field(10007)
    # 10007 = 3 mod 4, so T^2 + 1 is irreducible
    assert not all_roots(UniPoly((1, 0, 1)), field, rng)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 100), min_size=1, max_size=6), st.integers(0, 2**32 - 1))
def test_split_property(roots, seed):
    field = Field(101)
    f = _from_roots(field, roots)
    found = all_roots(f, field, np.random.default_rng(seed), scan_limit=0)
    assert found.roots == tuple(sorted(set(roots)))


def test_split_characteristic_two_extension(rng: np.random.Generator):
    field = Field(2, 13)
    roots = [0, 1, 2, 1000, 8191]
    f = _from_roots(field, roots)
    assert all_roots(f, field, rng, scan_limit=0).roots == tuple(sorted(roots))


def test_sample_root_uniform(f7: Field, rng: np.random.Generator):
    f = _from_roots(f7, [2, 5])
    draws = [sample_root(f, f7, rng) for _ in range(2000)]
    assert set(draws) == {2, 5}
    assert 0.45 < draws.count(2) / len(draws) < 0.55

    assert sample_root(UniPoly((1, 0, 1)), f7, rng) is None
    assert sample_root(UniPoly(), f7, rng) in range(7)


def _chi_square_limit(df: int, z: float = 3.5) -> float:
    # Wilson-Hilferty upper quantile of chi-square with df degrees of freedom
    return df * (1 - 2 / (9 * df) + z * math.sqrt(2 / (9 * df))) ** 3


@pytest.mark.parametrize("scan_limit", [0, DIRECT_SCAN_LIMIT])
@pytest.mark.parametrize("size", [1, 2, 3, 4, 5, 6])
def test_sample_root_chi_square(size: int, scan_limit: int):
    field = Field(67)
    rng = np.random.default_rng(size)
    roots = sorted(int(t) for t in rng.choice(67, size=size, replace=False))
    # T^2 + 1 has no root since 67 = 3 mod 4
    f = _from_roots(field, roots, UniPoly((1, 0, 1)))
    draws = 500 * size
    picks = [sample_root(f, field, rng, scan_limit) for _ in range(draws)]
    counts = Counter(picks)
    assert set(counts) == set(roots)
    if size == 1:
        return
    expected = draws / size
    stat = sum((counts[t] - expected) ** 2 / expected for t in roots)
    assert stat <= _chi_square_limit(size - 1)


@pytest.mark.parametrize("q", [67, 8, 121])
def test_split_matches_scan_random(q: int, rng: np.random.Generator):
    field = Field.from_order(q)
    for _ in range(200):
        degree = int(rng.integers(1, 9))
        coeffs = [int(c) for c in rng.integers(0, q, size=degree)] + [1 + int(rng.integers(q - 1))]
        f = UniPoly(tuple(coeffs))
        assert all_roots(f, field, rng, scan_limit=0) == all_roots(f, field)
