import json

import pytest

from polygreen import __version__
from polygreen.cli.run_cli import EXIT_CONFIG, EXIT_PASS, run_cli


def test_version(capsys):
    assert run_cli(["--version"]) == EXIT_PASS
    assert __version__ in capsys.readouterr().out


def test_unknown_subcommand():
    assert run_cli(["unknown"]) == EXIT_CONFIG


def test_fundsol_to_stdout(capsys):
    assert run_cli(["fundsol", "--m", "1", "--n", "3", "--r", "0.5"]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header == "r,value"
    r, value = (float(v) for v in row.split(","))
    assert r == 0.5
    assert value == pytest.approx(0.159155, rel=1e-5)


def test_fundsol_gradient_column(tmp_path):
    out = tmp_path / "gamma.csv"
    argv = ["fundsol", "--m", "1", "--n", "3", "--r", "1", "2"]
    assert run_cli(argv + ["--order", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r,value,grad1_norm"
    r, value, grad = (float(v) for v in lines[2].split(","))
    assert grad == pytest.approx(value / r)


@pytest.mark.parametrize(
    "argv",
    [
        ["fundsol", "--m", "1", "--n", "3", "--r", "0"],
        ["fundsol", "--m", "1", "--n", "5", "--r", "1"],
        ["verify-green", "--m", "2", "--n", "3"]
        + ["--spec", "green-odd-high:2:0"],
        ["verify-green", "--spec", "green-odd-high:x:0"],
        ["counterexample", "--m", "2", "--n", "2"],
        ["counterexample", "--m", "1", "--n", "3"],
        ["green", "--m", "2", "--n", "2", "--boundary", "cut-cell"],
    ],
)
def test_invalid_runs_exit_with_config_code(argv):
    assert run_cli(argv) == EXIT_CONFIG


def test_verify_green_with_a_config_file(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps(
            {
                "m": 1,
                "n": 2,
                "grid_levels": [0.125, 0.0625],
                "exclusion": 1.0,
                "lhs_source": "oracle",
                "samples": {"count": 10, "seed": 5, "min_sep": 0.0},
            }
        )
    )
    out = tmp_path / "out"
    code = run_cli(
        ["verify-green", "--config", str(config), "--out", str(out)]
    )
    summary = json.loads((out / "summary.json").read_text())
    assert code == (EXIT_PASS if summary["passed"] else 1)
    assert set(summary["specs"]) == {"green-even_i0_j0"}
    assert summary["config"]["lhs_source"] == "oracle"
    assert (out / "green-even_i0_j0_level1.csv").is_file()


def test_symmetry_and_report(tmp_path):
    out = tmp_path / "symmetry"
    argv = [
        "symmetry",
        "--m",
        "1",
        "--n",
        "2",
        "--domain",
        "rectangle",
        "--shape",
        "1",
        "1",
        "--grid-levels",
        "0.25",
        "0.125",
        "--out",
        str(out),
    ]
    assert run_cli(argv) == EXIT_PASS
    merged = tmp_path / "merged"
    argv = ["report", str(out / "summary.json"), "--out", str(merged)]
    assert run_cli(argv + ["--plot"]) == EXIT_PASS
    summary = json.loads((merged / "summary.json").read_text())
    assert summary["checks"]["symmetry_m1_n2"]["passed"]
    assert (merged / "refinement.png").is_file()


def test_report_needs_existing_inputs(tmp_path):
    argv = ["report", str(tmp_path / "none.json"), "--out", str(tmp_path)]
    assert run_cli(argv) == EXIT_CONFIG


@pytest.mark.slow
def test_counterexample_subcommand(tmp_path):
    argv = ["counterexample", "--m", "2", "--n", "3", "--out", str(tmp_path)]
    argv += ["--grid-levels", "0.125", "0.0625"]
    assert run_cli(argv) == EXIT_PASS


@pytest.mark.parametrize("boundary", ["zero-extension", "cut-cell"])
def test_green_writes_dumps_and_slices(tmp_path, boundary):
    argv = ["green", "--m", "1", "--n", "2", "--h", "0.125"]
    argv += ["--y", "0", "0", "--boundary", boundary, "--out", str(tmp_path)]
    assert run_cli(argv) == EXIT_PASS
    for name in ("green", "regular"):
        dump = (tmp_path / f"{name}_h0.125.bin").read_bytes()
        assert dump.startswith(b"polygreen-field dims=")
        rows = (tmp_path / f"{name}_h0.125.csv").read_text().splitlines()
        assert rows[0] == "x,y,value"
    rows = (tmp_path / "green_h0.125.csv").read_text().splitlines()[1:]
    values = {
        (float(x), float(y)): float(v)
        for x, y, v in (row.split(",") for row in rows)
    }
    assert values[(0.0, 0.0)] > values[(0.5, 0.0)] > 0
    assert values[(1.0, 0.0)] == 0.0
