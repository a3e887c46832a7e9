"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import itertools
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .errors import ConfigError, ContaminatedMeasurementError, InstabilityError, InvalidPairError, NoFrontError
from .export import read_trajectory_csv, svg_line_plot, trajectory_to_csv, write_records, write_rows
from .reduced import effective_diffusion, effective_rate
from .solver import compare_fast_switching, simulate
from .waves import (
    dispersion_curve,
    minimize_dispersion,
    rear_plateau,
    speed_front_tracking,
    speed_reaction_integral,
    steady_states,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
GLOBAL_DEFAULTS = {"out": None, "paper_scale": False, "workers": 1, "plot": False}
NUMERIC_ERRORS = (InstabilityError, NoFrontError, ContaminatedMeasurementError, ArithmeticError)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _measure(run: cfgmod.RunConfig):
    """Simulate and estimate speeds; estimator failures are reported, not raised."""
    traj = simulate(run.analysis_config())
    speeds = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if traj.model == "full":
            try:
                speeds["reaction_integral"] = speed_reaction_integral(traj, run.simulation.pair)
            except (*NUMERIC_ERRORS, ValueError) as exc:
                speeds["reaction_integral"] = exc
        try:
            speeds["front_tracking"] = speed_front_tracking(traj, run.threshold)
        except NoFrontError as exc:
            speeds["front_tracking"] = None if np.max(traj.total[-1]) == 0 else exc
        except (*NUMERIC_ERRORS, ValueError) as exc:
            speeds["front_tracking"] = exc
    return traj, speeds


def _speed_json(est):
    if est is None:
        return {"value": 0.0, "note": "no front: density identically zero"}
    if isinstance(est, Exception):
        return {"error": f"{type(est).__name__}: {est}"}
    row = est.as_row()
    if est.rear_settled is not None:
        row["rear_settled"] = est.rear_settled
        row["rear_state"] = list(est.rear_state) if est.rear_state else None
    if est.notes:
        row["notes"] = list(est.notes)
    return row


def cmd_simulate(args) -> int:
    run = cfgmod.load(args.config, paper_scale=args.paper_scale)
    traj, speeds = _measure(run)
    out = _out_dir(args)
    exported = traj.select(run.export_times)
    traj_path = out / f"{run.name}_trajectory.csv"
    trajectory_to_csv(exported, traj_path)

    pair = run.simulation.pair
    states = steady_states(pair)
    plateau, flat = rear_plateau(traj)
    g1, g2 = pair.rates_at_zero()
    summary = {
        "name": run.name,
        "model": traj.model,
        "switching": pair.to_record(),
        "grid": {"length": traj.grid.length, "n_cells": traj.grid.n_cells, "dx": traj.grid.dx},
        "dt": traj.dt,
        "t_end": float(traj.times[-1]),
        "snapshots": [float(t) for t in exported.times],
        "steady_states": {
            "front": list(states.front),
            "rear": [{"u1": s.u1, "u2": s.u2, "kind": s.kind} for s in states.rear],
        },
        "rear_plateau": {"rho1": plateau[0], "rho2": plateau[1], "total_range": flat},
        "boundary_contact": traj.boundary_contact,
        "c_min_predicted": minimize_dispersion(g1, g2).c_min,
        "speeds": {k: _speed_json(v) for k, v in speeds.items()},
    }
    (out / f"{run.name}_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if args.plot:
        series = [(f"t={t:g}", exported.x, exported.total[k]) for k, t in enumerate(exported.times)]
        svg_line_plot(series, out / f"{run.name}_profiles.svg", "x", "total density", run.name)
    print(f"wrote {traj_path}")
    for k, v in summary["speeds"].items():
        print(f"{k}: {v.get('value', v.get('error'))}")
    return EXIT_OK


def cmd_reduced_coefficients(args) -> int:
    run = cfgmod.load(args.config)
    pair = run.simulation.pair
    rho = np.linspace(0.0, args.rho_max, args.samples)
    rows = zip(rho, effective_diffusion(pair, rho), effective_rate(pair, rho))
    target = _out_dir(args) / f"{run.name}_reduced.csv" if args.out else sys.stdout
    write_rows(target, ("rho", "D", "r"), rows)
    if args.plot and args.out:
        svg_line_plot([("D", rho, effective_diffusion(pair, rho)), ("r", rho, effective_rate(pair, rho))],
                      _out_dir(args) / f"{run.name}_reduced.svg", "rho", "")
    return EXIT_OK


def _parse_grid(spec: str):
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ConfigError(f"--sigma-grid expects lo:hi:n, got {spec!r}") from None
    if not (0 < lo < hi) or n < 2:
        raise ConfigError("--sigma-grid needs 0 < lo < hi and n >= 2")
    return np.linspace(lo, hi, n)


def cmd_dispersion(args) -> int:
    if args.gamma1 < 0 or args.gamma2 < 0:
        raise ConfigError("--gamma1 and --gamma2 must be >= 0")
    sigma = _parse_grid(args.sigma_grid)
    _, c = dispersion_curve(args.gamma1, args.gamma2, sigma)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        best = minimize_dispersion(args.gamma1, args.gamma2, "numeric" if args.numeric else None)
    if args.out:
        out = _out_dir(args)
        write_rows(out / "dispersion.csv", ("sigma", "c"), zip(sigma, c))
        if args.plot:
            svg_line_plot([("c(sigma)", sigma, c)], out / "dispersion.svg", "sigma", "c")
    else:
        write_rows(sys.stdout, ("sigma", "c"), zip(sigma, c))
    print(f"# sigma_star={best.sigma_star!r},c_min={best.c_min!r},method={best.method}")
    return EXIT_OK


def cmd_speed(args) -> int:
    try:
        traj = read_trajectory_csv(args.trajectory)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read trajectory: {exc}") from None
    method = args.method
    if method == "auto":
        method = "both" if traj.model == "full" else "front-tracking"
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if method in ("both", "reaction-integral"):
            rows.append(speed_reaction_integral(traj).as_row())
        if method in ("both", "front-tracking"):
            rows.append(speed_front_tracking(traj, args.threshold).as_row())
    target = _out_dir(args) / "speed.csv" if args.out else sys.stdout
    write_records(target, rows)
    return EXIT_OK


def _sweep_points(run: cfgmod.RunConfig):
    keys = list(run.sweep)
    values = [run.sweep[k] for k in keys]
    combos = itertools.product(*values) if run.sweep_mode == "product" else zip(*values)
    return keys, [dict(zip(keys, combo)) for combo in combos]


def _sweep_one(job):
    raw, point, name, paper_scale = job
    raw = copy.deepcopy(raw)
    raw.pop("sweep", None)
    for k, v in point.items():
        cfgmod.set_path(raw, k, v)
    row = dict(point)
    try:
        run = cfgmod.from_dict(raw, name=name, paper_scale=paper_scale)
        _, speeds = _measure(run)
        g1, g2 = run.simulation.pair.rates_at_zero()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            predicted = minimize_dispersion(g1, g2).c_min
        est = speeds.get("reaction_integral", speeds.get("front_tracking"))
        if isinstance(est, Exception):
            raise est
        measured = 0.0 if est is None else est.value
        front = speeds.get("front_tracking")
        row.update(
            c_measured=measured,
            c_front_tracking=front.value if front is not None and not isinstance(front, Exception) else None,
            c_min_predicted=predicted,
            ratio=measured / predicted if predicted > 0 else None,
            status="ok",
        )
    except Exception as exc:  # per-row failure; the sweep carries on
        row.update(c_measured=None, c_front_tracking=None, c_min_predicted=None, ratio=None,
                   status=f"{type(exc).__name__}: {exc}")
    return row


def run_sweep(run: cfgmod.RunConfig, workers: int = 1, paper_scale: bool = False) -> list[dict]:
    if not run.sweep:
        raise ConfigError("config has no [sweep] parameters")
    _, points = _sweep_points(run)
    jobs = [(run.raw, p, run.name, paper_scale) for p in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


def cmd_sweep(args) -> int:
    # paper scale is applied per point, not at load time
    run = cfgmod.load(args.config)
    rows = run_sweep(run, args.workers, args.paper_scale)
    path = _out_dir(args) / f"{run.name}_sweep.csv"
    write_records(path, rows)
    if args.plot:
        ok = [r for r in rows if r["status"] == "ok"]
        if ok:
            idx = np.arange(len(ok))
            svg_line_plot([("measured", idx, [r["c_measured"] for r in ok]),
                           ("predicted c_min", idx, [r["c_min_predicted"] for r in ok])],
                          _out_dir(args) / f"{run.name}_sweep.svg", "sweep point", "speed", run.name)
    print(f"wrote {path}")
    failed = sum(r["status"] != "ok" for r in rows)
    if failed:
        print(f"{failed} of {len(rows)} sweep points failed", file=sys.stderr)
    return EXIT_OK


def cmd_compare_limit(args) -> int:
    run = cfgmod.load(args.config, paper_scale=args.paper_scale)
    if not run.epsilons:
        raise ConfigError("config has no [limit] epsilons")
    report = compare_fast_switching(run.simulation.pair, run.epsilons, run.simulation, flux=run.limit_flux)
    path = _out_dir(args) / f"{run.name}_limit.csv"
    write_rows(path, ("epsilon", "sup_distance"), zip(report.epsilons, report.distances))
    print(f"wrote {path}")
    if report.monotone is not None:
        print(f"monotone decreasing: {str(report.monotone).lower()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--out", help="output directory")
    common.add_argument("--paper-scale", action="store_true", help="domain 7000 and t_end 6500")
    common.add_argument("--workers", type=int, help="concurrent sweep points")
    common.add_argument("--plot", action="store_true", help="also write SVG line plots")

    parser = argparse.ArgumentParser(prog="goorgrow", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="run one configuration")
    p.add_argument("config", help="TOML file or bundled config name (e.g. fig1a)")
    p.set_defaults(func=cmd_simulate, default_out=".")

    p = sub.add_parser("reduced-coefficients", parents=[common], help="tabulate D(rho) and r(rho)")
    p.add_argument("config")
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--rho-max", type=float, default=1.0)
    p.set_defaults(func=cmd_reduced_coefficients, default_out=None)

    p = sub.add_parser("dispersion", parents=[common], help="dispersion relation c(sigma) and its minimum")
    p.add_argument("--gamma1", type=float, required=True)
    p.add_argument("--gamma2", type=float, required=True)
    p.add_argument("--sigma-grid", default="0.05:5:100", help="lo:hi:n")
    p.add_argument("--numeric", action="store_true", help="force numeric minimisation")
    p.set_defaults(func=cmd_dispersion, default_out=None)

    p = sub.add_parser("speed", parents=[common], help="estimate the front speed of a trajectory CSV")
    p.add_argument("trajectory")
    p.add_argument("--method", choices=("auto", "both", "reaction-integral", "front-tracking"), default="auto")
    p.add_argument("--threshold", type=float, default=0.1)
    p.set_defaults(func=cmd_speed, default_out=None)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep of measured vs predicted speed")
    p.add_argument("config")
    p.set_defaults(func=cmd_sweep, default_out=".")

    p = sub.add_parser("compare-limit", parents=[common], help="fast-switching convergence study")
    p.add_argument("config")
    p.set_defaults(func=cmd_compare_limit, default_out=".")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # defaults are filled here: the flag actions are shared with every subparser
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    if args.out is None:
        args.out = args.default_out
    try:
        return args.func(args)
    except (ConfigError, InvalidPairError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
