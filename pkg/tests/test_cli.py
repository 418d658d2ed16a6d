import json
import os
import subprocess
import sys

import pytest

from projflat.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_transport_matrix_example(capsys):
    code, out = run_cli(capsys, "transport", "--n", "3", "--i", "1", "--j", "2",
                        "--point", "2,3,4")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "projflat/1"
    assert payload["matrix"] == [[-4.0, -6.0, -8.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]


def test_transport_table(capsys):
    code, out = run_cli(capsys, "transport", "--n", "1", "--i", "1", "--j", "2",
                        "--point", "2", "--function", "gaussian_nd", "--order", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "derivative-table"
    assert payload["entries"][0]["alpha"] == [0]
    assert payload["entries"][0]["value"] == pytest.approx(0.7788007830714049)


def test_transport_json_point_syntax(capsys):
    code, out = run_cli(capsys, "transport", "--n", "3", "--i", "1", "--j", "2",
                        "--point", "[2, 3, 4]")
    assert code == 0
    assert json.loads(out)["point"] == [2.0, 3.0, 4.0]


def test_stereo_directions(capsys):
    code, out = run_cli(capsys, "stereo", "--to-sphere", "0,0")
    assert code == 0
    assert json.loads(out)["output"] == [-1.0, 0.0, 0.0]
    code, out = run_cli(capsys, "stereo", "--to-plane=-1,0,0")
    assert code == 0
    assert json.loads(out)["output"] == [0.0, 0.0]


def test_atlas_check(capsys):
    code, out = run_cli(capsys, "atlas", "check", "--n", "2", "--points", "50")
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert len(payload["checks"]) == 6


def test_classify_check_pass(capsys, tmp_path):
    out_path = tmp_path / "gauss.json"
    code, _ = run_cli(capsys, "classify", "--function", "gaussian_nd", "--n", "1",
                      "--check", "--out", str(out_path))
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["verdict"] == "schwartz-consistent"
    assert payload["expected_class"] == "schwartz"
    assert payload["config"]["seed"] == 101


def test_classify_check_oscillator(capsys):
    code, _ = run_cli(capsys, "classify", "--function", "oscillator", "--n", "1",
                      "--check")
    assert code == 0


def test_classify_check_mismatch_exits_1(capsys):
    # with no weights and no derivatives the oscillator looks bounded
    code, _ = run_cli(capsys, "classify", "--function", "oscillator", "--n", "1",
                      "--max-alpha", "0", "--max-beta", "0", "--check")
    assert code == 1


def test_config_errors_exit_2(capsys):
    assert main(["classify", "--function", "nope", "--n", "1"]) == 2
    assert main(["classify", "--function", "runge", "--n", "9"]) == 2
    assert main(["classify", "--function", "runge", "--n", "1",
                 "--max-alpha", "7"]) == 2
    assert main(["transport", "--n", "2", "--i", "1", "--j", "2",
                 "--point", "1,2,3"]) == 2
    assert main(["flatness", "--function", "runge", "--n", "1",
                 "--base", "0.5"]) == 2  # base point off the boundary
    assert main(["stereo", "--to-plane", "0.5,0.5"]) == 2  # not on the sphere
    capsys.readouterr()


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["classify", "--function", "runge"])  # missing --n
    assert exc.value.code == 2


def test_csv_format(capsys, tmp_path):
    out_path = tmp_path / "runge.csv"
    code, _ = run_cli(capsys, "classify", "--function", "runge", "--n", "1",
                      "--max-alpha", "2", "--max-beta", "1",
                      "--radii", "1,2,4", "--points-per-axis", "201",
                      "--format", "csv", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "alpha,beta,annulus,r_lo,r_hi,sup"
    assert len(lines) == 1 + 3 * 2 * 3  # pairs times annuli


def test_flatness_report_and_plot(capsys, tmp_path):
    out_path = tmp_path / "flat.json"
    code, _ = run_cli(capsys, "flatness", "--function", "gaussian_nd", "--n", "1",
                      "--levels", "6", "--samples", "16",
                      "--out", str(out_path), "--plot")
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["verdict"] == "flat-consistent"
    figure = out_path.with_suffix(".png")
    assert figure.exists() and figure.stat().st_size > 0


def test_plot_requires_out(capsys):
    code = main(["flatness", "--function", "gaussian_nd", "--n", "1",
                 "--levels", "4", "--samples", "8", "--plot"])
    assert code == 2
    capsys.readouterr()


def test_extend_check(capsys, tmp_path):
    out_path = tmp_path / "ext.json"
    code, _ = run_cli(capsys, "extend", "--function", "polynomial", "--n", "1",
                      "--levels", "8", "--samples", "16", "--check",
                      "--out", str(out_path))
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["verdict"] == "diverging"
    assert payload["runs"][0]["chart_j"] == 2


def test_flatness_csv(capsys, tmp_path):
    out_path = tmp_path / "flat.csv"
    code, _ = run_cli(capsys, "flatness", "--function", "runge", "--n", "1",
                      "--levels", "4", "--samples", "8", "--p-max", "1",
                      "--order", "1", "--format", "csv", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "p,alpha,level,band_lo,band_hi,sup"
    assert len(lines) == 1 + 2 * 2 * 4  # p values * alphas * levels


def test_seminorm_subcommand(capsys):
    code, out = run_cli(capsys, "seminorm", "--function", "gaussian_nd", "--n", "1",
                        "--alpha", "0", "--beta", "0")
    assert code == 0
    assert json.loads(out)["sup_lower_bound"] == 1.0


def test_seed_env_override():
    env = dict(os.environ, PROJFLAT_SEED="424242")
    proc = subprocess.run(
        [sys.executable, "-m", "projflat.cli", "flatness", "--function",
         "gaussian_nd", "--n", "1", "--levels", "4", "--samples", "8"],
        capture_output=True, text=True, env=env, check=True)
    assert json.loads(proc.stdout)["spec"]["seed"] == 424242


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "projflat.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for name in ("atlas", "classify", "seminorm", "flatness", "extend",
                 "transport", "stereo"):
        assert name in proc.stdout
