import os
import subprocess
import sys

import numpy as np
import pytest

from ringratchet import InvalidArgument, io
from ringratchet.cli import main


def run_cli(args, tmp_path, capsys):
    code = main(list(args) + ["--out", str(tmp_path)])
    return code, capsys.readouterr()


SMALL = ["--periods", "5", "--steps-per-period", "200", "--grid-points", "32"]


def test_fmt_round_trips_doubles():
    for v in (0.1, -1 / 3, 1e-300, 6.02214076e23, np.pi):
        assert float(io.fmt(v)) == v
    assert io.fmt(float("nan")) == "nan" and io.fmt(-float("inf")) == "-inf"


def test_write_read_csv(tmp_path):
    path = io.write_csv(tmp_path / "a.csv", ("x", "y"), [1, 2], [0.5, -1 / 3])
    cols, data = io.read_csv(path)
    assert cols == ("x", "y")
    np.testing.assert_array_equal(data, [[1, 0.5], [2, -1 / 3]])


def test_write_csv_validation(tmp_path):
    with pytest.raises(InvalidArgument):
        io.write_csv(tmp_path / "a.csv", ("x",), [1], [2])
    with pytest.raises(InvalidArgument):
        io.write_csv(tmp_path / "a.csv", ("x", "y"), [1], [2, 3])


def test_config_parsing(tmp_path):
    text = "# drive\ng = 0.2   # nonlinearity\n\nperiods=40\nexperiment = sweep\n"
    parsed = io.parse_config_text(text)
    assert parsed == {"g": "0.2", "periods": "40", "experiment": "sweep"}
    run = io.RunConfig().merged(parsed)
    assert run.g == 0.2 and run.periods == 40 and run.K == 2.0 and run.experiment == "sweep"
    with pytest.raises(InvalidArgument):
        io.parse_config_text("g 0.2")
    with pytest.raises(InvalidArgument):
        io.RunConfig().merged({"gamma": "1"})
    with pytest.raises(InvalidArgument):
        io.RunConfig().merged({"periods": "many"})


def test_run_config_defaults_are_headline_experiment():
    run = io.RunConfig()
    assert (run.g, run.K, run.omega, run.periods, run.w_minus1, run.w_0) == (
        0.1, 2.0, 10.0, 8000, 0.5, 0.5)


def test_output_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.setenv(io.OUTPUT_DIR_ENV, str(tmp_path))
    assert io.RunConfig().resolved_output_dir() == tmp_path
    assert io.RunConfig(output_dir="x").resolved_output_dir().name == "x"
    monkeypatch.delenv(io.OUTPUT_DIR_ENV)
    assert str(io.RunConfig().resolved_output_dir()) == "."


def test_svg_is_wellformed(tmp_path):
    import xml.etree.ElementTree as ET
    path = io.write_svg(tmp_path / "p.svg", [0, 1, 2], [[0, 1, np.nan], [1, 1, 1]],
                        ["a", "b"], "t", "x", "y")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    path = io.write_svg(tmp_path / "s.svg", [0, 1], [0, 1], scatter=True)
    assert "<circle" in path.read_text()


GOLDEN = {
    "evolve-tmm": ("evolve_tmm.csv", "time,current,p_minus1,p_0,p_plus1"),
    "evolve-gp": ("evolve_gp.csv", "time,current,p_minus1,p_0,p_plus1"),
    "lyapunov": ("lyapunov.csv", "time,log_ratio"),
    "portrait": ("portrait.csv", "current,phase_diff"),
    "twin": ("twin.csv", "time,current,current_twin"),
    "instability": ("instability.csv", "param_value,if"),
}


@pytest.mark.parametrize("command", sorted(GOLDEN))
def test_subcommand_writes_golden_schema(command, tmp_path, capsys):
    code, out = run_cli([command] + SMALL + ["--svg"], tmp_path, capsys)
    assert code == 0, out.err
    name, header = GOLDEN[command]
    lines = (tmp_path / name).read_text().splitlines()
    assert lines[0] == header
    assert len(lines) >= 2
    assert out.out.count("\n") == 1 and str(tmp_path / name) in out.out
    if command != "instability":
        assert (tmp_path / name.replace(".csv", ".svg")).exists()


def test_evolve_tmm_rows_and_current(tmp_path, capsys):
    code, _ = run_cli(["evolve-tmm", "--g", "0.2", "--periods", "200"], tmp_path, capsys)
    assert code == 0
    cols, data = io.read_csv(tmp_path / "evolve_tmm.csv")
    assert data.shape == (200 * 1000 // 10 + 1, 5)
    assert abs(np.mean(data[:, 1]) + 0.5) < 0.15


def test_lyapunov_integrable_case(tmp_path, capsys):
    code, out = run_cli(["lyapunov", "--g", "0", "--periods", "1000"], tmp_path, capsys)
    assert code == 0
    lam = float(out.out.split("lambda=")[1].split()[0])
    # linear dynamics: no growth, only a slow beat between Floquet modes
    assert abs(lam) < 2e-2
    _, data = io.read_csv(tmp_path / "lyapunov.csv")
    assert data[:, 1].max() < 1


def test_sweep_rows(tmp_path, capsys):
    code, out = run_cli(["sweep", "--param", "g", "--from", "0", "--to", "0.2", "--points", "41",
                         "--periods", "20", "--steps-per-period", "100"], tmp_path, capsys)
    assert code == 0 and "41 points" in out.out
    cols, data = io.read_csv(tmp_path / "sweep.csv")
    assert cols == ("param_value", "tac") and data.shape == (41, 2)
    np.testing.assert_allclose(data[:, 0], np.linspace(0, 0.2, 41))


def test_scans_write_their_tables(tmp_path, capsys):
    code, _ = run_cli(["lyapunov", "--from", "0", "--to", "0.1", "--points", "3"] + SMALL,
                      tmp_path, capsys)
    assert code == 0
    lines = (tmp_path / "lyapunov_scan.csv").read_text().splitlines()
    assert lines[0] == "param_value,lambda,lambda_ratio" and len(lines) == 4
    code, _ = run_cli(["instability", "--from", "0.02", "--to", "0.04", "--points", "2"] + SMALL,
                      tmp_path, capsys)
    assert code == 0
    assert len((tmp_path / "instability.csv").read_text().splitlines()) == 3


def test_transition_subcommand(tmp_path, capsys):
    code, out = run_cli(["transition", "--lo", "0.05", "--hi", "0.2", "--tol", "0.02",
                         "--periods", "1000"], tmp_path, capsys)
    assert code == 0, out.err
    assert "g_c=" in out.out
    assert (tmp_path / "transition.csv").read_text().startswith("param_value,tac\n")


def test_byte_identical_reruns(tmp_path, capsys):
    for sub in ("a", "b"):
        assert main(["twin", "--periods", "20", "--out", str(tmp_path / sub)]) == 0
        assert main(["evolve-gp"] + SMALL + ["--out", str(tmp_path / sub)]) == 0
    for name in ("twin.csv", "evolve_gp.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("g = 0.3\nperiods = 3\nsteps_per_period = 100\nw_minus1 = 0.7\n")
    code, _ = run_cli(["evolve-tmm", "--config", str(cfg), "--periods", "2"], tmp_path, capsys)
    assert code == 0
    _, data = io.read_csv(tmp_path / "evolve_tmm.csv")
    assert data.shape[0] == 2 * 100 // 10 + 1
    assert data[0, 1] == pytest.approx(-0.7) and data[0, 3] == pytest.approx(0.3)


def test_exit_code_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["evolve-tmm", "--bogus"])
    assert exc.value.code == 2
    code, out = run_cli(["evolve-tmm", "--periods", "0"], tmp_path, capsys)
    assert code == 2 and "error" in out.err
    code, out = run_cli(["transition", "--lo", "0.15", "--hi", "0.2", "--periods", "50"],
                        tmp_path, capsys)
    assert code == 2


def test_exit_code_runtime_error(tmp_path, capsys):
    code, out = run_cli(["evolve-tmm", "--g", "1e300", "--periods", "1"], tmp_path, capsys)
    assert code == 1
    assert "g=1e+300" in out.err and "runtime error" in out.err


def test_console_script_runs(tmp_path):
    exe = [sys.executable, "-m", "ringratchet.cli"]
    done = subprocess.run(exe + ["portrait", "--periods", "2", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert done.returncode == 0, done.stderr
    assert "portrait:" in done.stdout


def test_output_dir_from_environment(tmp_path):
    env = dict(os.environ, RINGRATCHET_OUTPUT_DIR=str(tmp_path))
    done = subprocess.run([sys.executable, "-m", "ringratchet.cli", "twin", "--periods", "2"],
                          capture_output=True, text=True, env=env, cwd=tmp_path.parent)
    assert done.returncode == 0, done.stderr
    assert (tmp_path / "twin.csv").exists()
