from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from tests._samples import FIXTURES_PATH
from vstrips.__main__ import cli


@pytest.fixture(name="runner")
def fixture_runner() -> CliRunner:
    # logs go to stderr and must stay out of the parsed stdout
    try:
        return CliRunner(mix_stderr=False)  # type: ignore[call-arg]
    except TypeError:
        return CliRunner()


def _lines(output: str):
    return [line for line in output.splitlines() if line]


def test_solve_inline(runner: CliRunner):
    result = runner.invoke(cli, ["solve", "--field", "3", "--poly", "1:1,1 2:0,0", "--seed", "1"])
    assert result.exit_code == 0, result.output
    lines = _lines(result.stdout)
    assert lines[0] in ("1 1", "2 2")
    assert lines[1].startswith("searches=")


def test_solve_file_and_stdin(runner: CliRunner):
    path = FIXTURES_PATH / "xy_minus_one.poly"
    from_file = runner.invoke(cli, ["solve", "--poly", str(path), "--seed", "4"])
    assert from_file.exit_code == 0, from_file.output

    text = path.read_text(encoding="utf-8")
    from_stdin = runner.invoke(cli, ["solve", "--poly", "-", "--seed", "4"], input=text)
    assert from_stdin.exit_code == 0, from_stdin.output
    assert from_stdin.stdout == from_file.stdout


def test_solve_seed_env(runner: CliRunner):
    args = ["solve", "--field", "7", "--poly", "1:1,1 6:0,0"]
    first = runner.invoke(cli, args, env={"SVS_SEED": "11"})
    second = runner.invoke(cli, args + ["--seed", "11"])
    assert first.exit_code == 0, first.output
    assert first.stdout == second.stdout


def test_solve_trace_and_ops(runner: CliRunner):
    result = runner.invoke(
        cli, ["solve", "--field", "8 2 3 1 1 0 1", "--poly", "1:1,0 1:0,1", "--trace", "--count-ops"]
    )
    assert result.exit_code == 0, result.output
    lines = _lines(result.stdout)
    assert lines[0].startswith("strip ")
    assert lines[0].endswith("roots=1")
    assert lines[1].startswith("ops add=")
    assert lines[-1] == "searches=1"


def test_solve_failure(runner: CliRunner):
    result = runner.invoke(cli, ["solve", "--field", "3", "--poly", "1:0,0", "--d", "1"])
    assert result.exit_code == 2
    assert "failure" in result.stdout

    capped = runner.invoke(cli, ["solve", "--field", "3", "--poly", "1:0,0", "--max-strips", "1", "--trace"])
    assert capped.exit_code == 2
    assert len([line for line in _lines(capped.stdout) if line.startswith("strip ")]) == 1


@pytest.mark.parametrize(
    "args",
    [
        ["solve", "--field", "6", "--poly", "1:1,1"],
        ["solve", "--poly", "1:1,1"],
        ["solve", "--field", "3", "--poly", "1:1,1 1:1,1"],
        ["solve", "--field", "3", "--poly", "1:1,1", "--max-strips", "0"],
        ["solve", "--field", "3"],
        ["simulate", "--q", "7"],
        ["simulate", "--q", "3", "--r", "2", "--d", "3", "--samples", "10"],
        ["predict", "--d", "0"],
        ["valueset", "--q", "7", "--d", "3", "--prefix", "0"],
        ["rank-check", "--q", "7", "--d", "2", "--strips", "0 0"],
        ["nonexistent"],
    ],
)
def test_usage_errors(runner: CliRunner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 1, result.output


def test_predict(runner: CliRunner):
    result = runner.invoke(cli, ["predict", "--d", "2", "--q", "3", "--smax", "2", "--alpha", "0.5"])
    assert result.exit_code == 0, result.output
    lines = _lines(result.stdout)
    assert lines[0] == "quantity,exact_num,exact_den,float,bound_radius"
    assert lines[1] == "mu,1,2,0.500000,"
    assert "P_C1,19,27,0.703704," in lines
    assert "P_C2,50,243,0.205761," in lines
    assert "NS_mean,19,9,2.111111," in lines
    assert any(line.startswith("chebyshev_A,") for line in lines)


def test_predict_table1_column(runner: CliRunner):
    result = runner.invoke(cli, ["predict", "--d", "30", "--smax", "15", "--format", "md"])
    assert result.exit_code == 0, result.output
    assert "| p_hat_1 |" in result.stdout
    assert "0.632121" in result.stdout
    assert "| p_hat_15 |" in result.stdout


def test_predict_small_tail_is_not_rounded_away(runner: CliRunner):
    result = runner.invoke(cli, ["predict", "--d", "30"])
    assert result.exit_code == 0, result.output
    tail = [line for line in _lines(result.stdout) if line.startswith("tail_16,")]
    # (1 - mu_30)^16 is e^-16 to double precision
    assert tail == ["tail_16,,,1.125352e-07,"]


def test_predict_hypothesis(runner: CliRunner):
    result = runner.invoke(cli, ["predict", "--d", "3", "--q", "3"])
    assert result.exit_code == 4


def test_exact(runner: CliRunner):
    result = runner.invoke(cli, ["exact", "--q", "3", "--r", "2", "--d", "2"])
    assert result.exit_code == 0, result.output
    lines = _lines(result.stdout)
    assert "P_C1,19,27,0.703704" in lines
    assert "P_Ca_2,50,243,0.205761" in lines
    assert "NS_mean,19,9,2.111111" in lines
    assert "N_mean,3,1,3.000000" in lines


def test_exact_guard(runner: CliRunner):
    result = runner.invoke(cli, ["exact", "--q", "67", "--d", "5", "--guard", "1000"])
    assert result.exit_code == 3


def test_valueset(runner: CliRunner):
    result = runner.invoke(cli, ["valueset", "--q", "7", "--d", "2", "--prefix", "1"])
    assert result.exit_code == 0, result.output
    assert "V_avg,4,1,4.000000" in _lines(result.stdout)

    sampled = runner.invoke(
        cli, ["valueset", "--q", "7", "--d", "4", "--prefix", "1", "--guard", "10", "--samples", "50"]
    )
    assert sampled.exit_code == 0, sampled.output
    assert "V_avg_sampled" in sampled.stdout

    guarded = runner.invoke(cli, ["valueset", "--q", "7", "--d", "4", "--prefix", "1", "--guard", "10"])
    assert guarded.exit_code == 3

    outside = runner.invoke(cli, ["valueset", "--q", "7", "--d", "2", "--prefix", "1", "--variant", "cmpp"])
    assert outside.exit_code == 4


def test_entropy(runner: CliRunner):
    result = runner.invoke(cli, ["entropy", "--q", "5", "--d", "2", "--samples", "100"])
    assert result.exit_code == 0, result.output
    assert "violations,,,0" in _lines(result.stdout)


def test_rank_check(runner: CliRunner):
    result = runner.invoke(cli, ["rank-check", "--q", "7", "--d", "3", "--trials", "5"])
    assert result.exit_code == 0, result.output
    assert len(_lines(result.stdout)) == 6

    collinear = runner.invoke(
        cli, ["rank-check", "--q", "3", "--r", "3", "--d", "2", "--strips", "0,0 1,0 2,0"]
    )
    assert collinear.exit_code == 0, collinear.output
    assert _lines(collinear.stdout)[1] == "1,0,6,7,1"


def test_simulate(runner: CliRunner):
    args = ["simulate", "--q", "7", "--r", "2", "--d", "3", "--samples", "300", "--reps", "2", "--smax", "5"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    lines = _lines(result.stdout)
    assert lines[0] == "s,p_bar,p_hat,eps"
    assert len(lines) == 1 + 5 + 3

    pooled = runner.invoke(cli, args, env={"SVS_WORKERS": "2"})
    assert pooled.exit_code == 0, pooled.output
    assert pooled.stdout == result.stdout


def test_simulate_preset_yaml(runner: CliRunner):
    result = runner.invoke(
        cli, ["simulate", "--preset", "table3", "--samples", "100", "--reps", "2", "--format", "yaml"]
    )
    assert result.exit_code == 0, result.output
    data = yaml.safe_load(result.stdout)
    assert data["config"]["q"] == 8
    assert data["config"]["samples"] == 100
    assert len(data["rows"]) == 6


def test_config_file(runner: CliRunner, tmp_path: Path):
    config_path = tmp_path / "config.yml"
    config_path.write_text(
        yaml.safe_dump({"config": {"seed": 5, "solve": {"field_spec": "3"}}}), encoding="utf-8"
    )
    from_config = runner.invoke(cli, ["--config-path", str(config_path), "solve", "--poly", "1:1,1 2:0,0"])
    explicit = runner.invoke(cli, ["solve", "--field", "3", "--poly", "1:1,1 2:0,0", "--seed", "5"])
    assert from_config.exit_code == 0, from_config.output
    assert from_config.stdout == explicit.stdout
