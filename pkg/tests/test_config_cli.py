import csv
import json

import pytest

from goorgrow import config as cfgmod
from goorgrow.cli import main
from goorgrow.errors import ConfigError
from goorgrow.export import read_trajectory_csv, trajectory_to_string
from goorgrow.solver import simulate
from goorgrow.waves import speed_front_tracking

SMALL = """\
name = "small"

[switching]
gamma1 = { family = "constant", a = 0.5 }
gamma2 = { family = "linear", b = 1.5 }

[grid]
length = 200.0
n_cells = 400

[time]
t_end = 60.0
output_times = [20.0, 40.0, 60.0]

[initial]
kind = "step"
level = 0.2
x_step = 50.0

[analysis]
sample_every = 5.0
"""


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL)
    return path


@pytest.fixture(scope="module")
def bundled_out(tmp_path_factory):
    """Run every bundled configuration once through the CLI."""
    out = tmp_path_factory.mktemp("bundled")
    codes = {}
    for name in cfgmod.bundled_names():
        if name.startswith("fig2"):
            cmd = "sweep"
        elif name.startswith("limit"):
            cmd = "compare-limit"
        else:
            cmd = "simulate"
        codes[name] = main([cmd, name, "--out", str(out)])
    return out, codes


# ---------------------------------------------------------------- config schema

def test_bundled_configs_parse():
    names = cfgmod.bundled_names()
    assert {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c"} <= set(names)
    for name in names:
        run = cfgmod.load(name)
        assert run.name == name


def test_unknown_key_reported_with_line(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(SMALL.replace("n_cells = 400", "n_cells = 400\nspacing = 0.5"))
    with pytest.raises(ConfigError, match=r"line 10: grid\.spacing: unknown key"):
        cfgmod.load(str(path))


def test_unknown_section_reported_with_line(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(SMALL + "\n[plotting]\ncolor = 1\n")
    with pytest.raises(ConfigError, match=r"line 2\d: plotting: unknown section"):
        cfgmod.load(str(path))


def test_bad_values_rejected(tmp_path):
    for old, new in [("n_cells = 400", "n_cells = -4"), ("level = 0.2", "level = \"high\""),
                     ('family = "linear"', 'family = "cubic"')]:
        path = tmp_path / "bad.toml"
        path.write_text(SMALL.replace(old, new))
        with pytest.raises(ConfigError):
            cfgmod.load(str(path))


def test_missing_config():
    with pytest.raises(ConfigError, match="no bundled config"):
        cfgmod.load("fig9z")


def test_paper_scale_keeps_resolution():
    desk = cfgmod.load("fig1a")
    paper = cfgmod.load("fig1a", paper_scale=True)
    assert paper.simulation.grid.length == 7000.0 and paper.simulation.t_end == 6500.0
    assert paper.simulation.grid.dx == desk.simulation.grid.dx
    assert cfgmod.load("fig2a", paper_scale=True).simulation.grid.n_cells == 28000


def test_sweep_paths_must_exist():
    raw = {"grid": {"length": 1.0}}
    cfgmod.set_path(raw, "grid.length", 2.0)
    assert raw["grid"]["length"] == 2.0
    with pytest.raises(ConfigError):
        cfgmod.set_path(raw, "nothing.here", 1.0)


# ---------------------------------------------------------------- subcommands

def test_every_bundled_config_executes(bundled_out):
    out, codes = bundled_out
    assert codes and all(code == 0 for code in codes.values()), codes


@pytest.mark.parametrize("name", ["fig1a", "fig1b", "fig1c", "fig1d"])
def test_simulate_writes_fig1_snapshots(bundled_out, name):
    out, _ = bundled_out
    traj = read_trajectory_csv(out / f"{name}_trajectory.csv")
    assert list(traj.times) == [200.0, 300.0, 400.0, 500.0]
    summary = json.loads((out / f"{name}_summary.json").read_text())
    assert summary["speeds"]["reaction_integral"]["value"] > 0.8
    ft = summary["speeds"]["front_tracking"]["value"]
    assert abs(ft - summary["speeds"]["reaction_integral"]["value"]) / ft < 0.02


def test_fig1d_rear_is_coexistence(bundled_out):
    out, _ = bundled_out
    summary = json.loads((out / "fig1d_summary.json").read_text())
    (rear,) = summary["steady_states"]["rear"]
    assert rear["kind"] == "coexistence"
    assert summary["rear_plateau"]["rho1"] == pytest.approx(rear["u1"], abs=1e-2)


def test_empty_domain_gives_zero_speed(bundled_out):
    out, _ = bundled_out
    traj = read_trajectory_csv(out / "empty_trajectory.csv")
    assert not traj.total.any()
    speeds = json.loads((out / "empty_summary.json").read_text())["speeds"]
    assert speeds["reaction_integral"]["value"] == 0.0
    assert speeds["front_tracking"]["value"] == 0.0


def test_constant_rate_sweep_ratios(bundled_out):
    out, _ = bundled_out
    rows = read_csv(out / "fig2a_sweep.csv")
    assert len(rows) == 9 and all(r["status"] == "ok" for r in rows)
    assert [(float(r["switching.gamma1.a"]), float(r["switching.gamma2.a"])) for r in rows][:2] == [(0.25, 0.5), (0.25, 1.0)]
    for r in rows:
        assert 0.97 <= float(r["ratio"]) <= 1.03


@pytest.mark.parametrize("name", ["fig2b", "fig2c"])
def test_degenerate_sweeps_exceed_prediction(bundled_out, name):
    out, _ = bundled_out
    rows = read_csv(out / f"{name}_sweep.csv")
    assert len(rows) == 3
    for r in rows:
        assert r["status"] == "ok" and float(r["ratio"]) > 1


@pytest.mark.parametrize("name", ["limit_fig1a", "limit_fig1d"])
def test_compare_limit_is_monotone(bundled_out, name):
    out, _ = bundled_out
    rows = read_csv(out / f"{name}_limit.csv")
    assert [float(r["epsilon"]) for r in rows] == [0.1, 0.05, 0.025]
    d = [float(r["sup_distance"]) for r in rows]
    assert d[0] > d[1] > d[2] > 0


def test_single_point_sweep_and_singleton_limit(tmp_path, small_cfg):
    text = small_cfg.read_text()
    sweep = tmp_path / "one.toml"
    sweep.write_text(text + '\n[sweep]\nmode = "zip"\n\n[sweep.parameters]\n"switching.gamma2.b" = [1.5]\n')
    assert main(["sweep", str(sweep), "--out", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "small_sweep.csv")) == 1
    limit = tmp_path / "lim.toml"
    limit.write_text(text + "\n[limit]\nepsilons = [0.1]\n")
    assert main(["compare-limit", str(limit), "--out", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "small_limit.csv")) == 1


def test_sweep_rows_keep_order_with_workers(tmp_path, small_cfg):
    sweep = tmp_path / "multi.toml"
    sweep.write_text(small_cfg.read_text() + '\n[sweep]\n\n[sweep.parameters]\n"switching.gamma2.b" = [1.5, 0.5, 1.0]\n')
    run = cfgmod.load(str(sweep))
    from goorgrow.cli import run_sweep

    serial, parallel = run_sweep(run, 1), run_sweep(run, 2)
    assert serial == parallel
    assert [r["switching.gamma2.b"] for r in serial] == [1.5, 0.5, 1.0]


def test_failed_sweep_point_is_recorded(tmp_path, small_cfg):
    sweep = tmp_path / "fail.toml"
    sweep.write_text(small_cfg.read_text() + '\n[sweep]\n\n[sweep.parameters]\n"grid.n_cells" = [400, -1]\n')
    assert main(["sweep", str(sweep), "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "small_sweep.csv")
    assert rows[0]["status"] == "ok" and rows[1]["status"].startswith("ConfigError")


def test_simulate_is_deterministic(tmp_path, small_cfg):
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["simulate", str(small_cfg), "--out", str(d), "--plot"]) == 0
        outputs.append(((d / "small_trajectory.csv").read_bytes(), (d / "small_summary.json").read_bytes()))
        assert (d / "small_profiles.svg").read_text().startswith("<svg")
    assert outputs[0] == outputs[1]


def test_global_flags_before_subcommand(tmp_path, small_cfg):
    assert main(["--out", str(tmp_path / "pre"), "simulate", str(small_cfg)]) == 0
    assert (tmp_path / "pre" / "small_trajectory.csv").exists()


def test_csv_round_trip_preserves_speed(tmp_path, small_cfg):
    run = cfgmod.load(str(small_cfg))
    traj = simulate(run.analysis_config())
    path = tmp_path / "t.csv"
    path.write_text(trajectory_to_string(traj))
    back = read_trajectory_csv(path)
    assert speed_front_tracking(back).value == speed_front_tracking(traj).value
    assert main(["speed", str(path), "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "speed.csv")
    assert [r["method"] for r in rows] == ["reaction_integral", "front_tracking"]
    assert float(rows[1]["value"]) == speed_front_tracking(traj).value


def test_dispersion_subcommand(capsys, tmp_path):
    assert main(["dispersion", "--gamma1", "0.5", "--gamma2", "0", "--sigma-grid", "0.5:2:4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "sigma,c" and len(lines) == 6
    assert lines[-1].startswith("# sigma_star=") and "method=explicit" in lines[-1]
    assert main(["dispersion", "--gamma1", "0.5", "--gamma2", "0.5", "--numeric", "--out", str(tmp_path)]) == 0
    assert "c_min=1.0" in capsys.readouterr().out
    assert len(read_csv(tmp_path / "dispersion.csv")) == 100


def test_reduced_coefficients_subcommand(capsys):
    assert main(["reduced-coefficients", "fig1b", "--samples", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "rho,D,r"
    # Gamma2(0) = 0, so r(0) = 1 and D(0) = 0
    assert lines[1] == "0.0,0.0,1.0"


def test_exit_codes(tmp_path, small_cfg, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(SMALL.replace("[grid]", "[grid]\nwidth = 3"))
    assert main(["simulate", str(bad), "--out", str(tmp_path)]) == 1
    assert "line" in capsys.readouterr().err
    assert main(["dispersion", "--gamma1", "-1", "--gamma2", "0"]) == 1
    assert main(["dispersion", "--gamma1", "1", "--gamma2", "0", "--sigma-grid", "2:1:3"]) == 1
    unstable = tmp_path / "unstable.toml"
    unstable.write_text(SMALL.replace("output_times", 'dt = 0.2\noutput_times'))
    assert main(["simulate", str(unstable), "--out", str(tmp_path)]) == 2
    assert "numerical failure" in capsys.readouterr().err
