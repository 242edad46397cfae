from collections import Counter

import numpy as np
import pytest

from tests._samples import assert_within_z, no_zeros, x_minus_y, xy_minus_one
from vstrips.errors import ArgumentError, DimensionMismatchError, DuplicateStripsError, StripsExhaustedError
from vstrips.field import Field
from vstrips.poly import MultiPoly, evaluate, sample_poly
from vstrips.svs import (
    StripSampler,
    StripSequence,
    strip_count,
    strip_from_index,
    strip_index,
    svs_run,
    svs_run_with_strips,
)


def test_strip_indexing(f8: Field):
    assert strip_count(f8, 3) == 64
    assert strip_index(f8, (3, 5)) == 43
    assert strip_from_index(f8, 3, 43) == (3, 5)
    with pytest.raises(ArgumentError):
        strip_count(f8, 1)


def test_sampler_exhausts(f3: Field, rng: np.random.Generator):
    sampler = StripSampler(f3, 3, rng)
    strips = list(sampler)
    assert len(strips) == 9
    assert len(set(strips)) == 9
    assert sampler.remaining == 0
    with pytest.raises(StripsExhaustedError):
        sampler.draw()


def test_sampler_uniform_first_draw(f3: Field, rng: np.random.Generator):
    counts = np.zeros(9, dtype=int)
    for _ in range(9000):
        counts[StripSampler(f3, 3, rng).draw_index()] += 1
    assert counts.min() > 850
    assert counts.max() < 1150


def test_sampler_full_permutation_uniform(f3: Field, rng: np.random.Generator):
    runs = 6000
    orders = Counter(tuple(StripSampler(f3, 2, rng)) for _ in range(runs))
    assert len(orders) == 6
    for count in orders.values():
        assert_within_z(count / runs, 1 / 6, runs, z=4.0)


def test_sampler_rejection_path(rng: np.random.Generator):
    field = Field(1031)
    sampler = StripSampler(field, 3, rng)
    assert sampler.size > 1 << 20
    strips = [sampler.draw() for _ in range(200)]
    assert len(set(strips)) == 200
    assert all(0 <= a < 1031 for strip in strips for a in strip)


def test_strip_sequence(f7: Field, rng: np.random.Generator):
    with pytest.raises(DuplicateStripsError):
        StripSequence(((1,), (2,), (1,)))
    with pytest.raises(DimensionMismatchError):
        StripSequence(((1,), (2, 3)))
    sequence = StripSequence.sample(f7, 2, 7, rng)
    assert sorted(sequence) == [(a,) for a in range(7)]
    assert len(sequence) == 7


def test_svs_fixed_strips(f3: Field, rng: np.random.Generator):
    result = svs_run_with_strips(xy_minus_one(f3), [(0,), (1,), (2,)], rng)
    assert result.found
    assert result.zero == (1, 1)
    assert result.searches == 2
    assert [(t.strip, t.root_count) for t in result.trace] == [((0,), 0), ((1,), 1)]


def test_svs_random_strips(f3: Field, rng: np.random.Generator):
    poly = xy_minus_one(f3)
    for _ in range(20):
        result = svs_run(poly, rng)
        assert result.zero in {(1, 1), (2, 2)}
        assert 1 <= result.searches <= 3


def test_svs_failure(f3: Field, rng: np.random.Generator):
    result = svs_run(no_zeros(f3), rng)
    assert not result.found
    assert result.zero is None
    assert result.searches == 3
    assert all(t.root_count == 0 for t in result.trace)

    capped = svs_run(no_zeros(f3), rng, max_strips=1)
    assert capped.searches == 1
    with pytest.raises(ArgumentError):
        svs_run(no_zeros(f3), rng, max_strips=0)


def test_svs_every_strip_has_a_root(f8: Field, rng: np.random.Generator):
    result = svs_run(x_minus_y(f8), rng)
    assert result.searches == 1
    assert result.zero[0] == result.zero[1]


def test_svs_zero_polynomial(f7: Field, rng: np.random.Generator):
    result = svs_run(MultiPoly.zero(f7, 3, 2), rng, trace=True)
    assert result.searches == 1
    assert result.trace[0].root_count == 7
    assert len(result.zero) == 3


def test_svs_zero_is_a_zero(f8: Field, rng: np.random.Generator):
    for _ in range(30):
        poly = sample_poly(f8, 3, 3, rng)
        result = svs_run(poly, rng, trace=False)
        assert result.trace == ()
        if result.found:
            assert evaluate(poly, result.zero) == 0


def test_svs_deterministic(f8: Field):
    poly = sample_poly(f8, 2, 3, np.random.default_rng(7))
    first = svs_run(poly, np.random.default_rng(99))
    second = svs_run(poly, np.random.default_rng(99))
    assert first == second


def test_svs_strip_length(f3: Field, rng: np.random.Generator):
    with pytest.raises(DimensionMismatchError):
        svs_run_with_strips(xy_minus_one(f3), [(0, 1)], rng)


def test_svs_count_ops(f7: Field, rng: np.random.Generator):
    poly = sample_poly(f7, 2, 3, rng)
    result = svs_run(poly, rng, count_ops=True)
    assert result.ops_used is not None
    assert result.ops_used.total > 0
    assert poly.field.counter is None
    assert svs_run(poly, rng).ops_used is None
