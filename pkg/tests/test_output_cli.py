import json

import pytest

from pilotwave.cli import main
from pilotwave.output import OutputError, load_summary, recheck, summary_dict, write_outputs

from conftest import default_config, run_cached

SMALL = dict(trajectories=300, t_final=1.0)


@pytest.fixture(scope="module")
def small_slit():
    return run_cached(default_config("double_slit", **SMALL))


def test_empty_ensemble_writes_header_only(tmp_path):
    res = run_cached(default_config("double_slit", trajectories=0, t_final=0.5))
    write_outputs(res, tmp_path, figures=False)
    assert (tmp_path / "trajectories.csv").read_text() == "traj_id,t,x\n"
    summary = load_summary(tmp_path)
    assert all(recheck(summary).values())


def test_written_files_and_formats(small_slit, tmp_path):
    paths = write_outputs(small_slit, tmp_path)
    names = sorted(p.name for p in paths)
    assert names == ["density.csv", "density.png", "summary.json", "trajectories.csv", "trajectories.png"]
    traj = (tmp_path / "trajectories.csv").read_text().splitlines()
    assert traj[0] == "traj_id,t,x"
    per_traj = (len(traj) - 1) // 300
    assert (len(traj) - 1) % 300 == 0 and per_traj >= 2
    dens = (tmp_path / "density.csv").read_text().splitlines()
    assert dens[0] == "t,x,rho"
    assert len(dens) - 1 == 5 * small_slit.config.n
    assert (tmp_path / "trajectories.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_summary_contents(small_slit):
    s = summary_dict(small_slit)
    assert s["schema_version"] == 1
    assert s["scenario"] == "double_slit" and s["seed"] == 1
    assert s["config"]["trajectories"] == 300
    assert set(s["checks"]) >= {"norm_drift", "equivariance", "midline_crossings"}
    json.dumps(s)  # serialisable as is


def test_rerun_is_byte_identical(tmp_path):
    from pilotwave import run_scenario

    cfg = default_config("spin_measurement", trajectories=200, seed=5)
    a, b = tmp_path / "a", tmp_path / "b"
    write_outputs(run_scenario(cfg), a)
    write_outputs(run_scenario(cfg), b)
    files = sorted(p.name for p in a.iterdir())
    assert "outcomes.csv" in files
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_outcomes_file(tmp_path):
    res = run_cached(default_config("spin_measurement", trajectories=50))
    write_outputs(res, tmp_path, figures=False)
    lines = (tmp_path / "outcomes.csv").read_text().splitlines()
    assert lines[0] == "traj_id,label" and len(lines) == 51
    assert {ln.split(",")[1] for ln in lines[1:]} <= {"up", "down"}


def test_momentum_summary_keys(tmp_path):
    res = run_cached(default_config("momentum_measurement", trajectories=500, t_final=5.0))
    write_outputs(res, tmp_path, figures=False)
    m = load_summary(tmp_path)["metrics"]
    for key in ("ks_momentum", "momentum_mean", "momentum_variance", "initial_velocity_max", "trajectory_law_error"):
        assert key in m


def test_unwritable_output_names_path(small_slit, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError, match=str(blocker)):
        write_outputs(small_slit, blocker / "sub", figures=False)


def test_cli_run_and_verify(tmp_path, capsys):
    out = tmp_path / "run"
    cfg = tmp_path / "momentum.cfg"
    cfg.write_text("# short run\nt_final = 5.0\nseed = 3\n")
    args = ["run", "momentum_measurement", "--config", str(cfg), "--out", str(out), "--trajectories", "500"]
    code = main(args + ["--no-figures"])
    assert code == 0
    assert "PASS  equivariance" in capsys.readouterr().out
    assert not (out / "trajectories.png").exists()
    assert main(["verify", str(out)]) == 0

    summary = json.loads((out / "summary.json").read_text())
    summary["checks"]["norm_drift"]["value"] = 1.0
    (out / "summary.json").write_text(json.dumps(summary))
    assert main(["verify", str(out)]) == 1
    assert "FAIL  norm_drift" in capsys.readouterr().out


def test_cli_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("n=1000\n")
    assert main(["run", "double_slit", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "n" in capsys.readouterr().err
    assert main(["run", "double_slit", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)]) == 2
    assert main(["run", "spin_measurement", "--trajectories", "-5", "--out", str(tmp_path)]) == 2
    assert main(["verify", str(tmp_path / "nowhere")]) == 2
    assert not (tmp_path / "o").exists()


def test_cli_rejects_unknown_scenario():
    with pytest.raises(SystemExit) as err:
        main(["run", "triple_slit", "--out", "x"])
    assert err.value.code == 2
