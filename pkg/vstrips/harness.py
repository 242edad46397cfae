from __future__ import annotations

import csv
import dataclasses as dc
import io
import logging
import math
import multiprocessing
import time
from collections import Counter
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from ._batch import CHUNK, StripEvaluator
from .analytics import entropy_bounds, mu, p_hat
from .errors import ArgumentError, ConfigInvalidError, ParseError
from .field import Field, prime_power
from .format import dump_yaml
from .oracle import DEFAULT_GUARD, EnumGuard, entropy_from_counts
from .poly import MultiPoly, Point, dim_space
from .svs import StripSampler, strip_count, strip_from_index, svs_run

_logger = logging.getLogger(__name__)

# Stream tags keep polynomial, strip and entropy randomness disjoint
_POLY_STREAM = 1
_STRIP_STREAM = 2
_ENTROPY_STREAM = 3

FORMATS = ("csv", "md", "yaml")

TABLE3_NOTE = (
    "Trivariate run of the F_8, d=3 configuration; "
    "the bivariate table3 preset is the reference and this variant is reported only."
)


@dc.dataclass(frozen=True)
class Preset:
    q: int
    r: int
    d: int
    samples: int
    s_max: int = 15
    note: Optional[str] = None


PRESETS: Mapping[str, Preset] = {
    "table1": Preset(q=67, r=2, d=30, samples=10**6),
    "table2": Preset(q=67, r=2, d=5, samples=10**6),
    "table3": Preset(q=8, r=2, d=3, samples=10**5, s_max=6),
    "table3-caption": Preset(q=8, r=3, d=3, samples=10**5, s_max=6, note=TABLE3_NOTE),
    "table4": Preset(q=11, r=3, d=5, samples=10**6),
    "table5": Preset(q=67, r=3, d=5, samples=10**6),
}


@dc.dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run: M polynomials searched along each of N random strip sequences."""

    q: int
    r: int
    d: int
    samples: int
    reps: int = 30
    s_max: int = 15
    seed: int = 0
    workers: int = 1
    shared_sample: bool = False
    max_strips: Optional[int] = None
    notes: Tuple[str, ...] = ()

    @classmethod
    def from_preset(cls, name: str, **overrides: Any) -> SimConfig:
        if name not in PRESETS:
            raise ConfigInvalidError(f"Unknown preset {name!r}, expected one of {sorted(PRESETS)}")
        preset = PRESETS[name]
        values: Dict[str, Any] = {
            "q": preset.q,
            "r": preset.r,
            "d": preset.d,
            "samples": preset.samples,
            "s_max": preset.s_max,
            "notes": (preset.note,) if preset.note else (),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def field(self) -> Field:
        return Field.from_order(self.q)

    @property
    def sequence_length(self) -> int:
        """Strips per sequence: all q^(r-1) unless capped."""
        total = self.q ** (self.r - 1)
        return total if self.max_strips is None else min(self.max_strips, total)

    def validate(self):
        """Raises ConfigInvalidError on inconsistent settings."""
        try:
            prime_power(self.q)
        except ArgumentError as error:
            raise ConfigInvalidError(str(error)) from error
        checks = {
            "r >= 2": self.r >= 2,
            "d >= 1": self.d >= 1,
            "q > d": self.q > self.d,
            "samples >= 1": self.samples >= 1,
            "reps >= 1": self.reps >= 1,
            "s_max >= 1": self.s_max >= 1,
            "workers >= 1": self.workers >= 1,
            "max_strips >= 1": self.max_strips is None or self.max_strips >= 1,
        }
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            raise ConfigInvalidError(f"Invalid simulation config ({', '.join(failed)}): {self}")

    def echo(self) -> Dict[str, Any]:
        out = dc.asdict(self)
        out["notes"] = list(self.notes)
        return out


@dc.dataclass(frozen=True)
class ReportRow:
    s: int
    p_bar: float
    p_hat: float
    eps: float


@dc.dataclass
class SimulationReport:
    config: SimConfig
    rows: List[ReportRow]
    n_bar: float
    fail_rate: float
    tail_mass: float
    inv_mu: float
    notes: List[str] = dc.field(default_factory=list)
    elapsed: float = 0.0

    def summary(self) -> Dict[str, float]:
        return {"n_bar": self.n_bar, "fail_rate": self.fail_rate, "inv_mu": self.inv_mu}


@dc.dataclass
class _ChunkCounts:
    sequence: int
    hits: np.ndarray  # runs ending at s = 1..s_max
    tail: int = 0
    fails: int = 0
    searches: int = 0
    found: int = 0


def _chunk_rng(cfg: SimConfig, sequence: int, chunk: int) -> np.random.Generator:
    stream = 0 if cfg.shared_sample else sequence
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, _POLY_STREAM, stream, chunk]))


def _strip_rng(cfg: SimConfig, sequence: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, _STRIP_STREAM, sequence]))


def _run_chunk(task: Tuple[SimConfig, int, int]) -> _ChunkCounts:
    cfg, sequence, chunk = task
    field = cfg.field
    dim = dim_space(cfg.r, cfg.d)
    m = min(CHUNK, cfg.samples - chunk * CHUNK)
    coeffs = _chunk_rng(cfg, sequence, chunk).integers(0, field.q, size=(m, dim))

    evaluator = StripEvaluator(field, cfg.r, cfg.d)
    # every chunk replays the same strip sequence from its own sampler
    sampler = StripSampler(field, cfg.r, _strip_rng(cfg, sequence))
    searches = np.zeros(m, dtype=np.int64)
    active = np.arange(m)
    for i in range(1, cfg.sequence_length + 1):
        strip = sampler.draw()
        hit = evaluator.root_counts(coeffs[active], strip) > 0
        searches[active[hit]] = i
        active = active[~hit]
        if not active.size:
            break

    found = searches > 0
    hits = np.bincount(searches[found & (searches <= cfg.s_max)], minlength=cfg.s_max + 1)[1:]
    return _ChunkCounts(
        sequence=sequence,
        hits=hits.astype(np.int64),
        tail=int((searches > cfg.s_max).sum()),
        fails=int((~found).sum()),
        searches=int(searches[found].sum()),
        found=int(found.sum()),
    )


def _tasks(cfg: SimConfig) -> Iterator[Tuple[SimConfig, int, int]]:
    chunks = math.ceil(cfg.samples / CHUNK)
    for sequence in range(cfg.reps):
        for chunk in range(chunks):
            yield cfg, sequence, chunk


def _map_chunks(cfg: SimConfig) -> Iterable[_ChunkCounts]:
    if cfg.workers == 1:
        yield from map(_run_chunk, _tasks(cfg))
        return
    with multiprocessing.Pool(processes=cfg.workers) as pool:
        # imap keeps task order, so merging stays independent of scheduling
        yield from pool.imap(_run_chunk, _tasks(cfg))


def simulate(cfg: SimConfig) -> SimulationReport:
    """Estimates p[C_a = s] for s <= s_max, the mean search count and the failure rate.

    Each of the `reps` strip sequences is drawn uniformly without replacement; the polynomials are
    a fresh sample per sequence unless `shared_sample` is set. Results depend only on the seed,
    not on the worker count.
    """

    cfg.validate()
    started = time.monotonic()
    chunks = math.ceil(cfg.samples / CHUNK)

    hits = np.zeros(cfg.s_max, dtype=np.int64)
    tail = fails = searches = found = 0
    for done, counts in enumerate(_map_chunks(cfg), start=1):
        hits += counts.hits
        tail += counts.tail
        fails += counts.fails
        searches += counts.searches
        found += counts.found
        if done % chunks == 0:
            _logger.info("Strip sequence %d/%d done", counts.sequence + 1, cfg.reps)

    runs = cfg.reps * cfg.samples
    rows = []
    for s in range(1, cfg.s_max + 1):
        predicted = float(p_hat(s, cfg.d))
        observed = int(hits[s - 1]) / runs
        rows.append(ReportRow(s, observed, predicted, abs(observed - predicted) / predicted))

    elapsed = time.monotonic() - started
    _logger.info("Simulated %d runs in %.1fs", runs, elapsed)
    for note in cfg.notes:
        _logger.warning(note)

    return SimulationReport(
        config=cfg,
        rows=rows,
        n_bar=searches / found if found else math.nan,
        fail_rate=fails / runs,
        tail_mass=tail / runs,
        inv_mu=float(1 / mu(cfg.d)),
        notes=list(cfg.notes),
        elapsed=elapsed,
    )


def empirical_output_dist(
    poly: MultiPoly,
    trials: int,
    rng: np.random.Generator,
) -> Dict[Point, float]:
    """Frequency of each zero returned by `trials` independent SVS runs (empty if none succeed)."""
    if trials < 1:
        raise ArgumentError(f"Need trials >= 1, got {trials}")
    outputs: Counter = Counter()
    for _ in range(trials):
        result = svs_run(poly, rng, trace=False)
        if result.zero is not None:
            outputs[result.zero] += 1
    total = sum(outputs.values())
    return {x: n / total for x, n in sorted(outputs.items())}


@dc.dataclass(frozen=True)
class EntropyReport:
    """Sampled mean of H_F next to its theoretical scale."""

    entropy: float
    mean_log_zeros: float
    ideal_upper: float
    svs_lower_coeff: float
    ratio: float
    flagged: bool
    violations: int
    samples: int


# Tolerance on H / log q^(r-1) below 1/(2 mu_d) before a sample is flagged
ENTROPY_SLACK = 0.05


def empirical_entropy(cfg: SimConfig, guard: EnumGuard = DEFAULT_GUARD) -> EntropyReport:
    """Mean exact H_F over `cfg.samples` random polynomials, with H_F <= log N(F) checked per sample."""
    cfg.validate()
    field = cfg.field
    guard.check(field.q**cfg.r, "entropy zero scan")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _ENTROPY_STREAM]))
    coeffs = rng.integers(0, field.q, size=(cfg.samples, dim_space(cfg.r, cfg.d)))

    evaluator = StripEvaluator(field, cfg.r, cfg.d)
    strips = [strip_from_index(field, cfg.r, i) for i in range(strip_count(field, cfg.r))]
    entropies = []
    log_zeros = []
    for start in range(0, cfg.samples, CHUNK):
        block = coeffs[start : start + CHUNK]
        counts = np.stack([evaluator.root_counts(block, strip) for strip in strips], axis=1)
        entropies.append(entropy_from_counts(counts))
        totals = counts.sum(axis=1)
        log_zeros.append(np.where(totals > 0, np.log(np.maximum(totals, 1)), 0.0))

    h = np.concatenate(entropies)
    log_n = np.concatenate(log_zeros)
    violations = int((h > log_n + 1e-9).sum())
    ideal_upper, coeff = entropy_bounds(cfg.q, cfg.r, cfg.d)
    entropy = float(h.mean())
    ratio = entropy / ideal_upper
    flagged = ratio < coeff - ENTROPY_SLACK
    if flagged:
        _logger.warning(
            "Entropy ratio %.6f below 1/(2 mu_d) - %.2f = %.6f", ratio, ENTROPY_SLACK, coeff - ENTROPY_SLACK
        )
    return EntropyReport(
        entropy=entropy,
        mean_log_zeros=float(log_n.mean()),
        ideal_upper=ideal_upper,
        svs_lower_coeff=coeff,
        ratio=ratio,
        flagged=flagged,
        violations=violations,
        samples=cfg.samples,
    )


# Report rendering


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def render_report(report: SimulationReport, fmt: str = "csv") -> str:
    """Table of s, p_bar, p_hat, eps at 6 decimals, followed by n_bar, fail_rate and inv_mu."""
    if fmt not in FORMATS:
        raise ArgumentError(f"Unknown format {fmt!r}, expected one of {FORMATS}")

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["s", "p_bar", "p_hat", "eps"])
        for row in report.rows:
            writer.writerow([row.s, _fmt(row.p_bar), _fmt(row.p_hat), _fmt(row.eps)])
        for key, value in report.summary().items():
            writer.writerow([key, _fmt(value)])
        return buffer.getvalue()

    if fmt == "md":
        lines = ["| s | p_bar | p_hat | eps |", "|---:|---:|---:|---:|"]
        for row in report.rows:
            lines.append(f"| {row.s} | {_fmt(row.p_bar)} | {_fmt(row.p_hat)} | {_fmt(row.eps)} |")
        lines.append("")
        for key, value in report.summary().items():
            lines.append(f"- {key}: {_fmt(value)}")
        for note in report.notes:
            lines.append(f"- note: {note}")
        return "\n".join(lines) + "\n"

    buffer = io.StringIO()
    dump_yaml(
        data={
            "config": report.config.echo(),
            "rows": [
                {"s": row.s, "p_bar": _round(row.p_bar), "p_hat": _round(row.p_hat), "eps": _round(row.eps)}
                for row in report.rows
            ],
            **{key: _round(value) for key, value in report.summary().items()},
            "tail_mass": _round(report.tail_mass),
            "notes": list(report.notes),
        },
        stream=buffer,
    )
    return buffer.getvalue()


def _round(x: float) -> float:
    return round(x, 6)


def parse_report_csv(text: str) -> Tuple[List[ReportRow], Dict[str, float]]:
    """Reads back the CSV of `render_report`: table rows and the summary lines."""
    rows: List[ReportRow] = []
    summary: Dict[str, float] = {}
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["s", "p_bar", "p_hat", "eps"]:
        raise ParseError(f"Unexpected report header: {header}")
    for record in reader:
        if not record:
            continue
        try:
            if len(record) == 4:
                rows.append(ReportRow(int(record[0]), *(float(x) for x in record[1:])))
            elif len(record) == 2:
                summary[record[0]] = float(record[1])
            else:
                raise ParseError(f"Unexpected report line: {record}")
        except ParseError:
            raise
        except ValueError as error:
            raise ParseError(f"Non-numeric report line: {record}") from error
    return rows, summary
