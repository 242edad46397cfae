import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, Tuple, Type, cast

import click
import numpy as np
import yaml

from . import analytics, oracle
from .errors import (
    ArgumentError,
    FieldZeroDivisionError,
    GuardExceededError,
    HypothesisError,
    ParseError,
    StripsExhaustedError,
)
from .field import Field
from .format import TABLE_FORMATS, render_rows, setup_logging
from .harness import FORMATS, PRESETS, SimConfig, empirical_entropy, render_report, simulate
from .poly import MultiPoly, load_poly, parse_inline
from .svs import StripSequence, strip_from_index, svs_run

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_GUARD = 3
EXIT_HYPOTHESIS = 4

# First match wins, so subclasses come before their bases
_EXIT_CODES: Sequence[Tuple[Type[BaseException], int]] = (
    (GuardExceededError, EXIT_GUARD),
    (HypothesisError, EXIT_HYPOTHESIS),
    (ArgumentError, EXIT_USAGE),
    (FieldZeroDivisionError, EXIT_USAGE),
    (StripsExhaustedError, EXIT_USAGE),
)

_EXACT_HEADER = ("quantity", "num", "den", "float")
_PREDICT_HEADER = ("quantity", "exact_num", "exact_den", "float", "bound_radius")


class _Cli(click.Group):
    """Command group mapping errors and outcomes onto exit codes."""

    def main(self, *args, **kwargs):  # type: ignore[override]
        kwargs["standalone_mode"] = False
        try:
            code = super().main(*args, **kwargs)
        except click.ClickException as error:
            error.show()
            code = EXIT_USAGE
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_USAGE
        except Exception as error:
            for exc_type, exc_code in _EXIT_CODES:
                if isinstance(error, exc_type):
                    _logger.error("%s: %s", type(error).__name__, error)
                    code = exc_code
                    break
            else:
                raise
        sys.exit(code or EXIT_OK)


@click.group(cls=_Cli)
@click.version_option(package_name="vstrips")
@click.option(
    "--config-path",
    default="~/.vstrips/config.yml",
    show_default=True,
    type=click.Path(),
    help="Path to config.yml file with default values.",
)
@click.pass_context
def cli(ctx: click.Context, config_path: str):
    group = cast(click.Group, ctx.command)

    config_path_expanded = Path(config_path).expanduser()
    if config_path_expanded.exists():
        with open(config_path_expanded, encoding="utf-8") as f:
            config = (yaml.safe_load(f) or {}).get("config", {})
            # Propagate common configs to all commands
            common = {k: v for k, v in config.items() if k not in group.commands}
            ctx.default_map = {
                command: {**common, **config.get(command, {})}
                for command in group.commands
            }


def _add_setup(func: Callable) -> Callable:
    """Add common options and initialize logging."""

    @click.option(
        "-v",
        "--verbose",
        is_flag=True,
        help="Enable verbose logging.",
    )
    @functools.wraps(func)
    def wrapper(verbose: bool, **kwargs):
        setup_logging(
            level=logging.DEBUG if verbose else logging.INFO,
            path=Path.home().absolute() / ".vstrips" / "logs" / "vstrips.log",
        )
        return func(**kwargs)

    return wrapper


def _add_seed(func: Callable) -> Callable:
    """Add the seed option shared by randomized commands."""

    @click.option(
        "--seed",
        metavar="SEED",
        envvar="SVS_SEED",
        show_envvar=True,
        type=click.INT,
        default=0,
        show_default=True,
        help="Master seed; output is a function of the flags and the seed.",
    )
    @functools.wraps(func)
    def wrapper(**kwargs):
        return func(**kwargs)

    return wrapper


def _format_option(choices: Sequence[str] = TABLE_FORMATS) -> Callable:
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(list(choices)),
        default="csv",
        show_default=True,
        help="Output format.",
    )


def _guard_option() -> Callable:
    return click.option(
        "--guard",
        metavar="STATES",
        type=click.INT,
        default=oracle.DEFAULT_GUARD.max_states,
        show_default=True,
        help="Maximum number of states an exhaustive enumeration may visit.",
    )


def _parse_field(value: str) -> Field:
    """Field from its order or from a `q p k [m_0 ... m_k]` spec line."""
    parts = value.split()
    if len(parts) == 1:
        try:
            return Field.from_order(int(parts[0]))
        except ValueError as error:
            if isinstance(error, ArgumentError):
                raise
            raise ParseError(f"Invalid field: {value!r}") from error
    return Field.parse_spec(value)


def _load_poly(
    value: str,
    field: Optional[Field],
    r: Optional[int],
    d: Optional[int],
) -> MultiPoly:
    if value == "-":
        return load_poly(click.get_text_stream("stdin"), field)
    path = Path(value)
    if ":" not in value and path.is_file():
        with open(path, encoding="utf-8") as f:
            return load_poly(f, field)
    if field is None:
        raise click.UsageError("--field is required with an inline polynomial")
    return parse_inline(value, field, r, d)


def _parse_strips(value: str) -> List[Tuple[int, ...]]:
    try:
        return [tuple(int(x) for x in token.split(",")) for token in value.split()]
    except ValueError as error:
        raise ParseError(f"Invalid strip list: {value!r}") from error


def _fraction_row(name: str, value: Any) -> Tuple[Any, ...]:
    return (name, value.numerator, value.denominator, float(value))


@cli.command(help="Find a zero of a polynomial by searching random vertical strips.")
@_add_setup
@_add_seed
@click.option(
    "--field",
    "field_spec",
    metavar="FIELD",
    type=click.STRING,
    help="Field order q, or 'q p k [m_0 ... m_k]'. Read from the polynomial file header when omitted.",
)
@click.option(
    "--poly",
    "poly_spec",
    metavar="POLY",
    required=True,
    type=click.STRING,
    help="Polynomial file, '-' for stdin, or inline terms like '1:1,1 2:0,0'.",
)
@click.option("--r", "r", type=click.INT, help="Number of variables for inline polynomials.")
@click.option("--d", "d", type=click.INT, help="Degree bound for inline polynomials.")
@click.option(
    "--max-strips",
    metavar="N",
    type=click.INT,
    help="Stop after this many strips instead of all q^(r-1).",
)
@click.option("--trace", is_flag=True, help="Print every searched strip.")
@click.option("--count-ops", is_flag=True, help="Print the number of field operations used.")
def solve(
    field_spec: Optional[str],
    poly_spec: str,
    r: Optional[int],
    d: Optional[int],
    max_strips: Optional[int],
    trace: bool,
    count_ops: bool,
    seed: int,
):
    field = _parse_field(field_spec) if field_spec else None
    poly = _load_poly(poly_spec, field, r, d)
    result = svs_run(
        poly,
        np.random.default_rng(seed),
        max_strips=max_strips,
        trace=trace,
        count_ops=count_ops,
    )

    if trace:
        for step in result.trace:
            click.echo(f"strip {' '.join(map(str, step.strip))} roots={step.root_count}")
    if count_ops and result.ops_used is not None:
        ops = result.ops_used
        click.echo(f"ops add={ops.add} mul={ops.mul} inv={ops.inv}")
    if result.zero is None:
        click.echo("failure")
        return EXIT_FAILURE
    click.echo(" ".join(map(str, result.zero)))
    click.echo(f"searches={result.searches}")
    return EXIT_OK


@cli.command("simulate", help="Reproduce the strip-count tables by Monte Carlo simulation.")
@_add_setup
@_add_seed
@click.option(
    "--preset",
    type=click.Choice(sorted(PRESETS)),
    help="Start from a published table configuration; explicit flags override it.",
)
@click.option("--q", "q", type=click.INT, help="Field order.")
@click.option("--r", "r", type=click.INT, help="Number of variables.")
@click.option("--d", "d", type=click.INT, help="Degree bound.")
@click.option("--samples", metavar="M", type=click.INT, help="Polynomials per strip sequence.")
@click.option("--reps", metavar="N", type=click.INT, help="Strip sequences (default 30).")
@click.option("--smax", "s_max", metavar="S", type=click.INT, help="Table depth (default 15).")
@click.option(
    "--workers",
    envvar="SVS_WORKERS",
    show_envvar=True,
    type=click.INT,
    default=1,
    show_default=True,
    help="Worker processes; results do not depend on it.",
)
@click.option(
    "--shared-sample",
    is_flag=True,
    help="Search the same polynomial sample along every strip sequence.",
)
@click.option("--max-strips", metavar="N", type=click.INT, help="Cap on strips per sequence.")
@_format_option(FORMATS)
def simulate_(
    preset: Optional[str],
    q: Optional[int],
    r: Optional[int],
    d: Optional[int],
    samples: Optional[int],
    reps: Optional[int],
    s_max: Optional[int],
    workers: int,
    shared_sample: bool,
    max_strips: Optional[int],
    fmt: str,
    seed: int,
):
    overrides = {
        "q": q,
        "r": r,
        "d": d,
        "samples": samples,
        "reps": reps,
        "s_max": s_max,
        "seed": seed,
        "workers": workers,
        "shared_sample": shared_sample,
        "max_strips": max_strips,
    }
    if preset:
        cfg = SimConfig.from_preset(preset, **overrides)
    else:
        missing = [name for name in ("q", "r", "d", "samples") if overrides[name] is None]
        if missing:
            raise click.UsageError(f"Missing {', '.join('--' + m for m in missing)} (or --preset)")
        cfg = SimConfig(**{k: v for k, v in overrides.items() if v is not None})

    report = simulate(cfg)
    click.echo(render_report(report, fmt), nl=False)


@cli.command(help="Print closed-form predictions and bounds.")
@_add_setup
@click.option("--d", "d", required=True, type=click.INT, help="Degree bound.")
@click.option("--smax", "s_max", type=click.INT, default=15, show_default=True, help="Rows of p_hat.")
@click.option("--q", "q", type=click.INT, help="Field order, enables the finite-q quantities.")
@click.option("--r", "r", type=click.INT, default=2, show_default=True, help="Number of variables.")
@click.option(
    "--variant",
    type=click.Choice(list(analytics.VARIANTS)),
    default=analytics.CMPP,
    show_default=True,
    help="Value set estimate behind the distribution bounds.",
)
@click.option("--alpha", type=click.FLOAT, help="Deviation for the Chebyshev bound on NS.")
@click.option("--c", "c", type=click.FLOAT, default=1.0, show_default=True, help="Root-finding constant of the cost model.")
@_format_option()
def predict(
    d: int,
    s_max: int,
    q: Optional[int],
    r: int,
    variant: str,
    alpha: Optional[float],
    c: float,
    fmt: str,
):
    rows: List[Tuple[Any, ...]] = [_fraction_row("mu", analytics.mu(d))]
    top = analytics.s_star(r, d, variant)
    for s in range(1, s_max + 1):
        radius: Any = ""
        if q is not None and s <= top:
            radius = analytics.prob_cs_bound(q, d, s, variant, r).radius
        rows.append(_fraction_row(f"p_hat_{s}", analytics.p_hat(s, d)) + (radius,))
    rows.append(("inv_mu", "", "", analytics.mu_float(d) ** -1))
    rows.append((f"tail_{top}", "", "", analytics.tail_prob(top, d)))
    rows.append(("searches_bound", "", "", analytics.expected_searches_bound(r, d)))

    if q is not None:
        rows.extend(
            [
                _fraction_row("P_C1", analytics.prob_c1_exact(q, d)),
                _fraction_row("P_C1C2_joint", analytics.two_strip_joint(q, d)),
                _fraction_row("P_C2", analytics.p_exact_c2(q, d)),
                _fraction_row("NS_mean", analytics.ns_mean(q, r, d)),
                ("NS_var_leading", "", "", analytics.ns_variance_leading(q, r, d)),
                ("tau", "", "", analytics.cost_model_tau(d, r, q, c)),
                ("cost_bound", "", "", analytics.expected_cost_bound(d, r, q, c)),
            ]
        )
        ideal_upper, coeff = analytics.entropy_bounds(q, r, d)
        rows.append(("H_ideal_upper", "", "", ideal_upper))
        rows.append(("H_svs_coeff", "", "", coeff))
        if alpha is not None:
            rows.append(("chebyshev_A", "", "", analytics.chebyshev_A_bound(alpha, q, r, d)))

    click.echo(render_rows(_PREDICT_HEADER, rows, fmt), nl=False)


@cli.command(help="Exact probabilities and NS statistics by exhaustive enumeration.")
@_add_setup
@click.option("--q", "q", required=True, type=click.INT, help="Field order.")
@click.option("--r", "r", type=click.INT, default=2, show_default=True, help="Number of variables.")
@click.option("--d", "d", required=True, type=click.INT, help="Degree bound.")
@click.option(
    "--strips",
    metavar="STRIPS",
    type=click.STRING,
    help="Strip sequence for the C_a distribution, e.g. '0 1' or '0,0 1,0'. Defaults to the first two strips.",
)
@_guard_option()
@_format_option()
def exact(q: int, r: int, d: int, strips: Optional[str], guard: int, fmt: str):
    field = Field.from_order(q)
    limit = oracle.EnumGuard(guard)
    sequence = (
        _parse_strips(strips)
        if strips
        else [strip_from_index(field, r, i) for i in range(min(2, field.q ** (r - 1)))]
    )

    rows: List[Tuple[Any, ...]] = [_fraction_row("P_C1", oracle.enumerate_prob_c1(field, r, d, limit))]
    for s, value in enumerate(oracle.enumerate_prob_cs(field, r, d, sequence, limit), start=1):
        rows.append(_fraction_row(f"P_Ca_{s}", value))
    rows.append(_fraction_row("NS_mean", oracle.mean_ns(field, r, d, limit)))
    rows.append(_fraction_row("NS_var", oracle.var_ns(field, r, d, limit)))
    rows.append(_fraction_row("N_mean", oracle.mean_zeros(field, r, d, limit)))
    rows.append(("H_avg", "", "", oracle.exact_avg_entropy(field, r, d, limit)))
    click.echo(render_rows(_EXACT_HEADER, rows, fmt), nl=False)


@cli.command(help="Average value set size of a polynomial family with fixed leading coefficients.")
@_add_setup
@_add_seed
@click.option("--q", "q", required=True, type=click.INT, help="Field order.")
@click.option("--d", "d", required=True, type=click.INT, help="Degree.")
@click.option(
    "--prefix",
    required=True,
    type=click.STRING,
    help="Leading coefficients a_d,a_{d-1},... as comma-separated element indices.",
)
@click.option(
    "--variant",
    type=click.Choice(list(analytics.VARIANTS)),
    help="Also print the estimate of this variant.",
)
@click.option(
    "--samples",
    metavar="M",
    type=click.INT,
    help="Fall back to a sampled average of M polynomials when enumeration exceeds the guard.",
)
@_guard_option()
@_format_option()
def valueset(
    q: int,
    d: int,
    prefix: str,
    variant: Optional[str],
    samples: Optional[int],
    guard: int,
    fmt: str,
    seed: int,
):
    field = Field.from_order(q)
    try:
        coeffs = [int(x) for x in prefix.split(",")]
    except ValueError as error:
        raise ParseError(f"Invalid prefix: {prefix!r}") from error
    j = len(coeffs)

    rows: List[Tuple[Any, ...]] = []
    try:
        rows.append(_fraction_row("V_avg", oracle.avg_value_set(field, d, j, coeffs, oracle.EnumGuard(guard))))
    except GuardExceededError:
        if samples is None:
            raise
        _logger.info("Family too large to enumerate, sampling %d members", samples)
        sampled = oracle.sampled_value_set(field, d, j, coeffs, samples, np.random.default_rng(seed))
        rows.append(("V_avg_sampled", "", "", sampled.mean))
        rows.append(("V_avg_stderr", "", "", sampled.stderr))

    if variant:
        bound = analytics.valueset_bounds(q, d, j, variant)
        rows.append(("mu_q", "", "", bound.center))
        rows.append((f"radius_{variant}", "", "", bound.radius))
    click.echo(render_rows(_EXACT_HEADER, rows, fmt), nl=False)


@cli.command(help="Sampled entropy of the SVS output distribution.")
@_add_setup
@_add_seed
@click.option("--q", "q", required=True, type=click.INT, help="Field order.")
@click.option("--r", "r", type=click.INT, default=2, show_default=True, help="Number of variables.")
@click.option("--d", "d", required=True, type=click.INT, help="Degree bound.")
@click.option("--samples", metavar="M", type=click.INT, default=1000, show_default=True, help="Polynomials sampled.")
@_guard_option()
@_format_option()
def entropy(q: int, r: int, d: int, samples: int, guard: int, fmt: str, seed: int):
    report = empirical_entropy(SimConfig(q=q, r=r, d=d, samples=samples, seed=seed), oracle.EnumGuard(guard))
    rows = [
        ("H", "", "", report.entropy),
        ("mean_log_N", "", "", report.mean_log_zeros),
        ("H_ideal_upper", "", "", report.ideal_upper),
        ("H_svs_coeff", "", "", report.svs_lower_coeff),
        ("H_ratio", "", "", report.ratio),
        ("flagged", "", "", int(report.flagged)),
        ("violations", "", "", report.violations),
    ]
    click.echo(render_rows(_EXACT_HEADER, rows, fmt), nl=False)


@cli.command("rank-check", help="Compare the rank of the strip specialization map with its generic dimension.")
@_add_setup
@_add_seed
@click.option("--q", "q", required=True, type=click.INT, help="Field order.")
@click.option("--r", "r", type=click.INT, default=2, show_default=True, help="Number of variables.")
@click.option("--d", "d", required=True, type=click.INT, help="Degree bound.")
@click.option("--s", "s", type=click.INT, default=2, show_default=True, help="Strips per tuple.")
@click.option("--trials", type=click.INT, default=50, show_default=True, help="Random strip tuples.")
@click.option(
    "--strips",
    metavar="STRIPS",
    type=click.STRING,
    help="Check one explicit tuple instead, e.g. '0,0 1,0 0,1'.",
)
@_format_option()
def rank_check(
    q: int,
    r: int,
    d: int,
    s: int,
    trials: int,
    strips: Optional[str],
    fmt: str,
    seed: int,
):
    field = Field.from_order(q)
    if strips:
        tuples = [StripSequence(tuple(_parse_strips(strips)))]
    else:
        rng = np.random.default_rng(seed)
        tuples = [StripSequence.sample(field, r, s, rng) for _ in range(trials)]

    rows = []
    mismatches = 0
    for i, sequence in enumerate(tuples, start=1):
        generic = oracle.vandermonde_generic(sequence, r, d, field)
        found = oracle.phi_matrix_rank(sequence, r, d, field)
        expected = analytics.dim_im_phi(len(sequence), r, d)
        if generic and found != expected:
            mismatches += 1
        rows.append((i, int(generic), found, expected, int(not generic or found == expected)))

    click.echo(render_rows(("trial", "generic", "rank", "dim_im_phi", "match"), rows, fmt), nl=False)
    if mismatches:
        _logger.error("%d generic tuples disagree with dim Im(Phi)", mismatches)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    # Executed when running locally via python3 -m vstrips
    cli()
