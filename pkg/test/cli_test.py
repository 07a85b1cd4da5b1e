import io
import json

import pandas as pd
import pytest
from click.testing import CliRunner

from fracsubspace.cli import main
from fracsubspace.examples import example_ids


@pytest.fixture
def runner():
    return CliRunner()


def test_list(runner):
    result = runner.invoke(main, ["list"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert len(lines) == 10
    assert [line.split()[0] for line in lines] == example_ids()


def test_verify_example_with_overrides(runner):
    result = runner.invoke(main, ["verify", "--example", "burgers-coupled", "--set", "alpha=0.3",
                                  "--set", "beta=0.8"])
    assert result.exit_code == 0, result.output
    assert "burgers-coupled [default]" in result.output
    assert result.output.rstrip().endswith("=> PASS")
    assert "FAIL" not in result.output


def test_verify_custom_grid_and_free_constant(runner):
    result = runner.invoke(main, ["verify", "--example", "population", "--set", "a1=2", "--grid", "t=0.1:0.5:3"])
    assert result.exit_code == 0, result.output


@pytest.mark.parametrize("args", [
    ["verify", "--example", "no-such-problem"],
    ["verify", "--example", "burgers-coupled", "--set", "alpha=1/2"],
    ["verify", "--example", "burgers-coupled", "--set", "zeta=1"],
    ["verify", "--example", "burgers-coupled", "--set", "alpha"],
    ["verify", "--example", "mixed", "--grid", "t=1:0:3"],
    ["verify", "--example", "mixed", "--tol", "0"],
    ["verify", "--example", "mixed", "--frontier", "0"],
    ["verify"],
    ["verify", "--all", "--example", "mixed"],
    ["reduce", "--example", "boussinesq-2d", "--subspace", "cubic"],
])
def test_configuration_errors_exit_2(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 2, result.output


def test_reduce_prints_one_line_per_unknown(runner):
    result = runner.invoke(main, ["reduce", "--example", "boussinesq-system"])
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("D^(alpha1)[K1] = ")
    assert lines[2].startswith("D^(alpha2)[L1] = ")


def test_reduce_rl_system_is_tagged(runner):
    result = runner.invoke(main, ["reduce", "--example", "kdv-system"])
    assert result.exit_code == 0, result.output
    assert all(line.startswith("RL D^(alpha)[") for line in result.output.splitlines())


def test_solve_prints_series(runner):
    result = runner.invoke(main, ["solve", "--example", "diffusion-like", "--terms", "3"])
    assert result.exit_code == 0, result.output
    assert "solution 1" in result.output
    assert "  K3 = " in result.output
    assert "[Series]" in result.output


def test_solve_power_law_branches(runner):
    result = runner.invoke(main, ["solve", "--example", "burgers-coupled"])
    assert result.exit_code == 0, result.output
    assert "free constants" in result.output


def test_sample_csv_to_stdout(runner):
    result = runner.invoke(main, ["sample", "--example", "boussinesq-system", "--grid", "t=0.1:1:3",
                                  "--grid", "x=0:1:2"])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.output))
    assert list(frame.columns) == ["t", "x", "f", "g"]
    assert len(frame) == 6


def test_sample_csv_is_byte_identical_across_runs(runner, tmp_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        result = runner.invoke(main, ["sample", "--example", "boussinesq-system", "--grid", "t=0.1:2:7",
                                      "--grid", "x=0:3:9", "--out", str(out)])
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) == 1 + 7 * 9


def test_sample_xlsx_file(runner, tmp_path):
    out = tmp_path / "samples.xlsx"
    result = runner.invoke(main, ["sample", "--example", "mixed", "--format", "xlsx", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()


def test_sample_xlsx_needs_a_file(runner):
    result = runner.invoke(main, ["sample", "--example", "mixed", "--format", "xlsx"])
    assert result.exit_code == 2


def test_sample_without_closed_form(runner):
    result = runner.invoke(main, ["sample", "--example", "boussinesq-2d", "--subspace", "quartic"])
    assert result.exit_code == 2
    assert "no closed-form" in result.output


def test_export_then_verify_spec(runner, tmp_path):
    out = tmp_path / "kdv.json"
    result = runner.invoke(main, ["export", "--example", "kdv-system", "--set", "alpha=0.35", "--set", "sigma=-1",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    raw = json.loads(out.read_text())
    assert raw["params"]["alpha"]["value"] == "7/20"
    assert raw["free_constants"]["sigma"] == -1.0
    result = runner.invoke(main, ["verify", "--spec", str(out)])
    assert result.exit_code == 0, result.output


def test_spec_and_example_are_exclusive(runner, tmp_path):
    out = tmp_path / "mixed.json"
    runner.invoke(main, ["export", "--example", "mixed", "--out", str(out)])
    result = runner.invoke(main, ["reduce", "--example", "mixed", "--spec", str(out)])
    assert result.exit_code == 2


def test_non_invariant_spec_exits_1(runner, tmp_path):
    out = tmp_path / "broken.json"
    runner.invoke(main, ["export", "--example", "boussinesq-system", "--out", str(out)])
    raw = json.loads(out.read_text())
    raw["N"][1] = "f*f"
    out.write_text(json.dumps(raw))
    result = runner.invoke(main, ["verify", "--spec", str(out)])
    assert result.exit_code == 1
    assert "=> FAIL" in result.output
    result = runner.invoke(main, ["reduce", "--spec", str(out)])
    assert result.exit_code == 1
