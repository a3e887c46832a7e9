"""TOML run configurations: loading, schema checks and conversion to solver objects."""
from __future__ import annotations

import copy
import re
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ConfigError
from .solver import Grid1D, InitialCondition, SimulationConfig
from .switching import SwitchingPair

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PAPER_LENGTH = 7000.0
PAPER_T_END = 6500.0

# section -> allowed keys
SCHEMA: dict[str, tuple[str, ...]] = {
    "switching": ("gamma1", "gamma2", "epsilon"),
    "grid": ("length", "n_cells"),
    "time": ("t_end", "dt", "output_times"),
    "initial": ("kind", "level", "x_step"),
    "model": ("kind", "scheme", "flux"),
    "analysis": ("sample_every", "threshold"),
    "sweep": ("parameters", "mode"),
    "limit": ("epsilons", "flux"),
    "paper_scale": ("length", "t_end", "n_cells", "output_times"),
}
TOP_LEVEL = ("name", "description")
REQUIRED = ("switching", "grid", "time")


@dataclass
class RunConfig:
    """A parsed configuration file; ``raw`` keeps the validated dict for sweeps."""

    name: str
    raw: dict[str, Any]
    simulation: SimulationConfig
    sample_every: Optional[float] = None
    threshold: float = 0.1
    sweep: dict[str, list] = field(default_factory=dict)
    sweep_mode: str = "product"
    epsilons: list[float] = field(default_factory=list)
    limit_flux: str = "potential"
    source: str = ""

    @property
    def export_times(self) -> list[float]:
        return [float(t) for t in self.simulation.output_times]

    def analysis_config(self) -> SimulationConfig:
        """Simulation config with the extra sampling times used for speed estimates."""
        sim = self.simulation
        if not self.sample_every:
            return sim
        samples = np.arange(self.sample_every, sim.t_end + 1e-9 * sim.t_end, self.sample_every)
        times = sorted(set(np.round(np.concatenate([samples, sim.output_times]), 12).tolist()))
        return replace(sim, output_times=times)


def _line_of(text: str, key: str) -> str:
    if not text:
        return ""
    leaf = key.split(".")[-1]
    pat = re.compile(rf"^\s*(\[{re.escape(key)}\]|\"?{re.escape(leaf)}\"?\s*=)")
    for no, line in enumerate(text.splitlines(), 1):
        if pat.search(line):
            return f"line {no}: "
    return ""


def _err(text: str, key: str, msg: str) -> ConfigError:
    return ConfigError(f"{_line_of(text, key)}{key}: {msg}")


def _number(text, key, value, positive=False, nonneg=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _err(text, key, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise _err(text, key, f"expected an integer, got {value!r}")
    if positive and not value > 0:
        raise _err(text, key, f"must be positive, got {value!r}")
    if nonneg and not value >= 0:
        raise _err(text, key, f"must be >= 0, got {value!r}")
    return int(value) if integer else float(value)


def set_path(raw: dict, dotted: str, value) -> None:
    """Assign ``raw["a"]["b"]["c"] = value`` for ``dotted = "a.b.c"``."""
    keys = dotted.split(".")
    node = raw
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            raise ConfigError(f"sweep parameter {dotted!r} does not address a config section")
        node = node[k]
    node[keys[-1]] = value


def validate(raw: dict[str, Any], text: str = "") -> None:
    for key in raw:
        if key in TOP_LEVEL:
            continue
        if key not in SCHEMA:
            raise _err(text, key, f"unknown section; allowed {sorted([*SCHEMA, *TOP_LEVEL])}")
        if not isinstance(raw[key], dict):
            raise _err(text, key, "must be a table")
        allowed = SCHEMA[key]
        unknown = sorted(set(raw[key]) - set(allowed))
        if unknown:
            raise _err(text, f"{key}.{unknown[0]}", f"unknown key; allowed {list(allowed)}")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required section [{key}]")


def from_dict(raw: dict[str, Any], text: str = "", name: str = "run", paper_scale: bool = False) -> RunConfig:
    validate(raw, text)
    raw = copy.deepcopy(raw)
    if paper_scale:
        _apply_paper_scale(raw)

    try:
        pair = SwitchingPair.from_record(raw["switching"])
    except ConfigError as exc:
        raise ConfigError(f"{_line_of(text, 'switching')}switching: {exc}") from None

    g = raw["grid"]
    for k in ("length", "n_cells"):
        if k not in g:
            raise _err(text, "grid", f"missing {k}")
    grid = Grid1D(_number(text, "grid.length", g["length"], positive=True),
                  _number(text, "grid.n_cells", g["n_cells"], positive=True, integer=True))

    tm = raw["time"]
    if "t_end" not in tm:
        raise _err(text, "time", "missing t_end")
    t_end = _number(text, "time.t_end", tm["t_end"], positive=True)
    dt = tm.get("dt", "auto")
    if dt != "auto":
        dt = _number(text, "time.dt", dt, positive=True)
    outs = tm.get("output_times", [t_end])
    if not isinstance(outs, list) or not outs:
        raise _err(text, "time.output_times", "must be a nonempty list")
    outs = [_number(text, "time.output_times", v, nonneg=True) for v in outs]
    if max(outs) > t_end:
        raise _err(text, "time.output_times", f"entries must not exceed t_end = {t_end}")

    ini = raw.get("initial", {})
    kind = ini.get("kind", "step")
    if kind != "step":
        raise _err(text, "initial.kind", "only 'step' initial data can be declared in a config file")
    level = _number(text, "initial.level", ini.get("level", 0.2), nonneg=True)
    x_step = _number(text, "initial.x_step", ini.get("x_step", 100.0), nonneg=True)
    if x_step > grid.length:
        raise _err(text, "initial.x_step", f"{x_step} lies outside the domain [0, {grid.length}]")

    mdl = raw.get("model", {})
    try:
        sim = SimulationConfig(
            pair=pair,
            grid=grid,
            t_end=t_end,
            output_times=outs,
            dt=dt,
            model=mdl.get("kind", "full"),
            initial=InitialCondition.step(level, x_step),
            scheme=mdl.get("scheme", "euler"),
            flux=mdl.get("flux", "mean"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{_line_of(text, 'model')}model: {exc}") from None

    ana = raw.get("analysis", {})
    sample_every = ana.get("sample_every")
    if sample_every is not None:
        sample_every = _number(text, "analysis.sample_every", sample_every, positive=True)
    threshold = _number(text, "analysis.threshold", ana.get("threshold", 0.1), positive=True)

    sweep = raw.get("sweep", {})
    params = sweep.get("parameters", {})
    if not isinstance(params, dict):
        raise _err(text, "sweep.parameters", "must be a table of dotted keys -> value lists")
    for k, vals in params.items():
        if not isinstance(vals, list) or not vals:
            raise _err(text, k, "sweep values must be a nonempty list")
        probe = copy.deepcopy(raw)
        set_path(probe, k, vals[0])
    mode = sweep.get("mode", "product")
    if mode not in ("product", "zip"):
        raise _err(text, "sweep.mode", "must be 'product' or 'zip'")
    if mode == "zip" and len({len(v) for v in params.values()}) > 1:
        raise _err(text, "sweep.parameters", "zip mode needs equal-length value lists")

    lim = raw.get("limit", {})
    eps = [_number(text, "limit.epsilons", e, positive=True) for e in lim.get("epsilons", [])]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise _err(text, "limit.epsilons", "must be strictly decreasing")
    limit_flux = lim.get("flux", "potential")
    if limit_flux not in ("mean", "potential"):
        raise _err(text, "limit.flux", "must be 'mean' or 'potential'")

    return RunConfig(
        name=str(raw.get("name", name)),
        raw=raw,
        simulation=sim,
        sample_every=sample_every,
        threshold=threshold,
        sweep=params,
        sweep_mode=mode,
        epsilons=eps,
        limit_flux=limit_flux,
        source=text,
    )


def _apply_paper_scale(raw: dict) -> None:
    # domain 7000 and horizon 6500 at the configured resolution
    ps = raw.get("paper_scale", {})
    g, tm = raw["grid"], raw["time"]
    dx = g["length"] / g["n_cells"]
    g["length"] = ps.get("length", PAPER_LENGTH)
    g["n_cells"] = ps.get("n_cells", int(round(g["length"] / dx)))
    old_end = tm["t_end"]
    tm["t_end"] = ps.get("t_end", PAPER_T_END)
    if "output_times" in ps:
        tm["output_times"] = ps["output_times"]
    elif "output_times" in tm:
        scale = tm["t_end"] / old_end
        tm["output_times"] = [t * scale for t in tm["output_times"]]


def bundled_names() -> list[str]:
    files = resources.files("goorgrow") / "configs"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".toml"))


def resolve(path_or_name: str) -> tuple[str, str]:
    """Return (text, name) for a config path or a bundled config name."""
    p = Path(path_or_name)
    if p.is_file():
        return p.read_text(encoding="utf-8"), p.stem
    bundled = resources.files("goorgrow") / "configs" / f"{path_or_name}.toml"
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8"), path_or_name
    raise ConfigError(f"no config file {path_or_name!r} and no bundled config of that name (bundled: {bundled_names()})")


def load(path_or_name: str, paper_scale: bool = False) -> RunConfig:
    text, name = resolve(path_or_name)
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path_or_name}: {exc}") from None
    return from_dict(raw, text, name, paper_scale)
