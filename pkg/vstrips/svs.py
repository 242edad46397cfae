from __future__ import annotations

import dataclasses as dc
import logging
from typing import Dict, Iterable, Iterator, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .errors import ArgumentError, DimensionMismatchError, DuplicateStripsError, StripsExhaustedError
from .field import Elem, Field, OpCounter
from .poly import MultiPoly, Point, Strip, evaluate, specialize
from .roots import all_roots

_logger = logging.getLogger(__name__)

# Strip spaces up to this size are shuffled lazily; larger ones use rejection sampling
_SHUFFLE_LIMIT = 1 << 20


def strip_count(field: Field, r: int) -> int:
    """Number q^(r-1) of vertical strips in F_q^r."""
    if r < 2:
        raise ArgumentError(f"Need at least two variables, got r={r}")
    return field.q ** (r - 1)


def strip_index(field: Field, strip: Sequence[Elem]) -> int:
    """Integer sum(a_j * q^j) identifying a strip."""
    return sum(a * field.q**j for j, a in enumerate(strip))


def strip_from_index(field: Field, r: int, index: int) -> Strip:
    return tuple((index // field.q**j) % field.q for j in range(r - 1))


class StripSampler:
    """Distinct vertical strips of F_q^r drawn uniformly without replacement."""

    def __init__(self, field: Field, r: int, rng: np.random.Generator):
        self.field = field
        self.r = r
        self.rng = rng
        self.size = strip_count(field, r)
        self.emitted = 0
        # lazy Fisher-Yates: positions >= emitted that were swapped away
        self._moved: Dict[int, int] = {}
        self._used: Set[int] = set()

    @property
    def remaining(self) -> int:
        return self.size - self.emitted

    def draw_index(self) -> int:
        """Index of the next strip.

        Raises:
            StripsExhaustedError: All q^(r-1) strips were emitted.
        """
        if self.emitted >= self.size:
            raise StripsExhaustedError(f"All {self.size} strips already drawn")

        if self.size <= _SHUFFLE_LIMIT:
            i = self.emitted
            j = int(self.rng.integers(i, self.size))
            chosen = self._moved.get(j, j)
            self._moved[j] = self._moved.pop(i, i)
            self.emitted += 1
            return chosen

        while True:
            index = strip_index(
                self.field,
                [int(a) for a in self.rng.integers(0, self.field.q, size=self.r - 1)],
            )
            if index not in self._used:
                self._used.add(index)
                self.emitted += 1
                return index

    def draw(self) -> Strip:
        return strip_from_index(self.field, self.r, self.draw_index())

    def __iter__(self) -> Iterator[Strip]:
        return self

    def __next__(self) -> Strip:
        try:
            return self.draw()
        except StripsExhaustedError:
            raise StopIteration from None


@dc.dataclass(frozen=True)
class StripSequence:
    """Ordered pairwise distinct strips."""

    strips: Tuple[Strip, ...]

    def __post_init__(self):
        strips = tuple(tuple(int(a) for a in strip) for strip in self.strips)
        object.__setattr__(self, "strips", strips)
        if len(set(strips)) != len(strips):
            raise DuplicateStripsError(f"Strips are not pairwise distinct: {strips}")
        if len({len(strip) for strip in strips}) > 1:
            raise DimensionMismatchError("Strips of different lengths")

    @classmethod
    def sample(cls, field: Field, r: int, length: int, rng: np.random.Generator) -> StripSequence:
        sampler = StripSampler(field, r, rng)
        return cls(tuple(sampler.draw() for _ in range(length)))

    def __len__(self) -> int:
        return len(self.strips)

    def __iter__(self) -> Iterator[Strip]:
        return iter(self.strips)


@dc.dataclass(frozen=True)
class StripTrace:
    strip: Strip
    root_count: int


@dc.dataclass(frozen=True)
class SvsResult:
    """Outcome of one SVS run; `zero` is None on failure."""

    zero: Optional[Point]
    searches: int
    trace: Tuple[StripTrace, ...] = ()
    ops_used: Optional[OpCounter] = None

    @property
    def found(self) -> bool:
        return self.zero is not None


def _search(
    poly: MultiPoly,
    strips: Iterable[Strip],
    rng: np.random.Generator,
    trace: bool,
    count_ops: bool,
) -> SvsResult:
    field = poly.field
    work = poly
    if count_ops:
        work = dc.replace(poly, field=field.with_counter())

    records = []
    searches = 0
    for strip in strips:
        searches += 1
        if len(strip) != poly.r - 1:
            raise DimensionMismatchError(f"Strip {strip} has length {len(strip)}, expected {poly.r - 1}")
        roots = all_roots(specialize(work, strip), work.field, rng)
        count = roots.count(field)
        _logger.debug("Strip %d %s: %d roots", searches, strip, count)
        if trace:
            records.append(StripTrace(tuple(strip), count))
        if count:
            t = roots.choose(work.field, rng)
            assert t is not None
            zero = tuple(strip) + (t,)
            assert evaluate(poly, zero) == 0, f"{zero} is not a zero"
            return SvsResult(zero, searches, tuple(records), work.field.counter)
    return SvsResult(None, searches, tuple(records), work.field.counter)


def svs_run(
    poly: MultiPoly,
    rng: np.random.Generator,
    max_strips: Optional[int] = None,
    trace: bool = True,
    count_ops: bool = False,
) -> SvsResult:
    """Searches random distinct vertical strips until one holds a zero.

    Args:
        poly (MultiPoly): Polynomial in F_{r,d}.
        rng (np.random.Generator): Stream for strip choice and root choice.
        max_strips (Optional[int], optional): Stop after this many strips. Defaults to all q^(r-1).
        trace (bool, optional): Record every searched strip. Defaults to True.
        count_ops (bool, optional): Count field operations into `ops_used`. Defaults to False.

    Returns:
        SvsResult: First zero found with the number of strips searched, or a failure.
    """

    if max_strips is not None and max_strips < 1:
        raise ArgumentError(f"max_strips must be positive: {max_strips}")
    sampler = StripSampler(poly.field, poly.r, rng)
    limit = sampler.size if max_strips is None else min(max_strips, sampler.size)
    strips = (sampler.draw() for _ in range(limit))
    return _search(poly, strips, rng, trace, count_ops)


def svs_run_with_strips(
    poly: MultiPoly,
    strips: Union[StripSequence, Sequence[Strip]],
    rng: np.random.Generator,
    trace: bool = True,
    count_ops: bool = False,
) -> SvsResult:
    """SVS over a fixed strip order; `searches` is the index of the first strip with a root."""
    if not isinstance(strips, StripSequence):
        strips = StripSequence(tuple(strips))
    return _search(poly, strips, rng, trace, count_ops)
