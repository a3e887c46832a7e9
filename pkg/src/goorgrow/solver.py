"""Finite-difference integrators for the two-species model and its reduction.

Species 1 diffuses and species 2 proliferates:

    d_t rho1 = d_xx rho1 - rho1 G1(rho)/eps + rho2 G2(rho)/eps
    d_t rho2 = rho2 (1 - rho) + rho1 G1(rho)/eps - rho2 G2(rho)/eps

on a uniform cell-centred grid with zero-flux ends. The reduced model is
``d_t rho = d_x(D(rho) d_x rho) + r(rho) rho`` in conservative flux form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, InstabilityError
from .reduced import coefficient_table, equilibrium_fractions
from .switching import SwitchingPair

SAFETY = 0.4
BLOWUP_LEVEL = 10.0
BOUNDARY_FRACTION = 0.1
BOUNDARY_LEVEL = 1e-3
_CHECK_EVERY = 200


@dataclass(frozen=True)
class Grid1D:
    length: float
    n_cells: int

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigError("grid length must be positive")
        if int(self.n_cells) != self.n_cells or self.n_cells < 3:
            raise ConfigError("grid needs an integer n_cells >= 3")

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True)
class InitialCondition:
    """Step data (``level`` on each species left of ``x_step``) or custom arrays.

    For custom data give ``rho1``/``rho2`` (full model) and/or ``rho``
    (reduced model).
    """

    kind: str = "step"
    level: float = 0.2
    x_step: float = 100.0
    rho1: Optional[np.ndarray] = field(default=None, repr=False)
    rho2: Optional[np.ndarray] = field(default=None, repr=False)
    rho: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("step", "custom"):
            raise ConfigError(f"initial condition kind must be 'step' or 'custom', got {self.kind!r}")
        if self.kind == "step" and not self.level >= 0:
            raise ConfigError("step level must be >= 0")

    @classmethod
    def step(cls, level: float, x_step: float) -> InitialCondition:
        return cls("step", float(level), float(x_step))

    @classmethod
    def custom(cls, rho1=None, rho2=None, rho=None) -> InitialCondition:
        conv = lambda a: None if a is None else np.asarray(a, dtype=float)
        return cls("custom", rho1=conv(rho1), rho2=conv(rho2), rho=conv(rho))


@dataclass(frozen=True)
class GridState:
    """Densities at one time. Reduced-model states carry only ``rho``."""

    time: float
    rho1: Optional[np.ndarray] = None
    rho2: Optional[np.ndarray] = None
    rho: Optional[np.ndarray] = None

    @property
    def total(self) -> np.ndarray:
        if self.rho is not None:
            return self.rho
        return self.rho1 + self.rho2


@dataclass
class SimulationConfig:
    pair: SwitchingPair
    grid: Grid1D
    t_end: float
    output_times: Sequence[float]
    dt: Union[float, str] = "auto"
    model: str = "full"
    initial: InitialCondition = field(default_factory=InitialCondition)
    scheme: str = "euler"
    table_samples: int = 4096
    flux: str = "mean"  # reduced model: "mean" face diffusivity or "potential" differences
    growth: bool = True  # test hook: False drops the logistic term

    def __post_init__(self):
        if self.model not in ("full", "reduced"):
            raise ConfigError(f"model must be 'full' or 'reduced', got {self.model!r}")
        if self.scheme not in ("euler", "strang"):
            raise ConfigError(f"scheme must be 'euler' or 'strang', got {self.scheme!r}")
        if self.flux not in ("mean", "potential"):
            raise ConfigError(f"flux must be 'mean' or 'potential', got {self.flux!r}")
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        times = np.asarray(self.output_times, dtype=float)
        if times.size == 0:
            raise ConfigError("output_times must not be empty")
        if np.any(times < 0) or np.any(times > self.t_end * (1 + 1e-12)):
            raise ConfigError("output_times must lie in [0, t_end]")
        if isinstance(self.dt, str):
            if self.dt != "auto":
                raise ConfigError("dt must be a positive number or 'auto'")
        elif not self.dt > 0:
            raise ConfigError("dt must be positive")


@dataclass
class Trajectory:
    """Snapshots of one run; arrays are (n_times, n_cells)."""

    model: str
    grid: Grid1D
    times: np.ndarray
    rho1: Optional[np.ndarray] = None
    rho2: Optional[np.ndarray] = None
    rho: Optional[np.ndarray] = None
    boundary_contact: bool = False
    dt: float = float("nan")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def total(self) -> np.ndarray:
        if self.rho is not None:
            return self.rho
        return self.rho1 + self.rho2

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> GridState:
        if self.model == "reduced":
            return GridState(float(self.times[i]), rho=self.rho[i])
        return GridState(float(self.times[i]), self.rho1[i], self.rho2[i])

    def states(self) -> list[GridState]:
        return [self.state(i) for i in range(len(self))]

    def select(self, times) -> Trajectory:
        """Sub-trajectory at the requested snapshot times (must be present)."""
        idx = [int(np.argmin(np.abs(self.times - t))) for t in times]
        for i, t in zip(idx, times):
            if not math.isclose(self.times[i], t, rel_tol=1e-9, abs_tol=1e-9):
                raise KeyError(f"no snapshot at t = {t}")
        pick = lambda a: None if a is None else a[idx]
        return replace(self, times=self.times[idx], rho1=pick(self.rho1), rho2=pick(self.rho2), rho=pick(self.rho))


def make_initial(initial: InitialCondition, grid: Grid1D, model: str = "full") -> GridState:
    """Initial state on ``grid``; reduced runs start from the summed density."""
    n = grid.n_cells
    if initial.kind == "step":
        if not 0 <= initial.x_step <= grid.length:
            raise ConfigError(f"x_step = {initial.x_step} lies outside [0, {grid.length}]")
        profile = np.where(grid.x < initial.x_step, initial.level, 0.0)
        if model == "reduced":
            return GridState(0.0, rho=2.0 * profile)
        return GridState(0.0, profile.copy(), profile.copy())

    def check(a, name):
        if a is None or a.shape != (n,):
            raise ConfigError(f"custom initial data needs {name} with {n} entries")
        return a.astype(float).copy()

    if model == "reduced":
        if initial.rho is not None:
            return GridState(0.0, rho=check(initial.rho, "rho"))
        return GridState(0.0, rho=check(initial.rho1, "rho1") + check(initial.rho2, "rho2"))
    return GridState(0.0, check(initial.rho1, "rho1"), check(initial.rho2, "rho2"))


_RHO_SCAN = np.linspace(0.0, 1.05, 2048)


def stable_dt(config: SimulationConfig) -> float:
    """Explicit step bound: SAFETY * min(dx^2 / 2 D_max, 1 / G_max, 1 / r_max)."""
    if not isinstance(config.dt, str):
        return float(config.dt)
    dx = config.grid.dx
    if config.model == "full":
        bounds = [dx * dx / 2.0, 1.0]
        if config.scheme == "euler":
            pair = config.pair
            g_max = np.max(pair.gamma1.values(_RHO_SCAN, clamp=True) + pair.gamma2.values(_RHO_SCAN, clamp=True))
            g_max /= pair.epsilon
            if g_max > 0:
                bounds.append(1.0 / g_max)
    else:
        table = coefficient_table(config.pair, config.table_samples)
        d_max = float(np.max(table.diffusion))
        r_max = float(np.max(np.abs(table.rate)))
        bounds = []
        if d_max > 0:
            bounds.append(dx * dx / (2.0 * d_max))
        if r_max > 0:
            bounds.append(1.0 / r_max)
        if not bounds:
            bounds.append(1.0)
    return SAFETY * min(bounds)


def _output_schedule(config: SimulationConfig) -> np.ndarray:
    return np.unique(np.clip(np.asarray(config.output_times, dtype=float), 0.0, config.t_end))


def _check_finite(t, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)) or np.max(np.abs(a)) > BLOWUP_LEVEL:
            raise InstabilityError(
                f"solution left the admissible range at t = {t:.6g} "
                f"(non-finite or |value| > {BLOWUP_LEVEL}); reduce dt or refine the grid"
            )


def _touches_boundary(total: np.ndarray, grid: Grid1D) -> bool:
    edge = grid.x >= (1.0 - BOUNDARY_FRACTION) * grid.length
    return bool(np.any(total[edge] > BOUNDARY_LEVEL))


def _laplacian(u: np.ndarray, dx: float, out: np.ndarray) -> np.ndarray:
    # zero-flux ends via mirrored ghost cells; written as a flux difference
    flux = np.diff(u)
    out[0] = flux[0]
    out[-1] = -flux[-1]
    out[1:-1] = flux[1:] - flux[:-1]
    out /= dx * dx
    return out


def _run(config: SimulationConfig, state: GridState, step, fields: tuple[str, ...]) -> Trajectory:
    """Shared time loop: advance ``step(arrays, h)`` and record outputs."""
    dt = stable_dt(config)
    schedule = _output_schedule(config)
    arrays = [getattr(state, f).copy() for f in fields]
    records = {f: [] for f in fields}
    t = 0.0
    touched = False
    n_steps = 0
    for t_out in schedule:
        while t < t_out - 1e-12 * max(1.0, t_out):
            h = min(dt, t_out - t)
            # overflow is caught by the finiteness checks and reported as instability
            with np.errstate(over="ignore", invalid="ignore"):
                step(arrays, h)
            t = t + h if t_out - (t + h) > 1e-12 * max(1.0, t_out) else t_out
            n_steps += 1
            if n_steps % _CHECK_EVERY == 0:
                _check_finite(t, *arrays)
        _check_finite(t, *arrays)
        for f, a in zip(fields, arrays):
            records[f].append(a.copy())
        total = arrays[0] if len(arrays) == 1 else arrays[0] + arrays[1]
        touched = touched or _touches_boundary(total, config.grid)
    out = {f: np.array(v) for f, v in records.items()}
    return Trajectory(config.model, config.grid, schedule, boundary_contact=touched, dt=dt, **out)


def simulate_full(config: SimulationConfig) -> Trajectory:
    """Integrate the two-species system and return snapshots at ``output_times``."""
    if config.model != "full":
        raise ConfigError("simulate_full needs model = 'full'")
    pair = config.pair
    g1f, g2f, eps = pair.gamma1, pair.gamma2, pair.epsilon
    dx = config.grid.dx
    growth = config.growth
    lap = np.empty(config.grid.n_cells)

    def euler(arrays, h):
        r1, r2 = arrays
        rho = r1 + r2
        switch = (r1 * g1f.values(rho, clamp=True) - r2 * g2f.values(rho, clamp=True)) / eps
        _laplacian(r1, dx, lap)
        d2 = switch + r2 * (1.0 - rho) if growth else switch
        r1 += h * (lap - switch)
        r2 += h * d2

    def switch_exact(r1, r2, h):
        # rho is invariant under switching, so the rates are frozen and
        # the 2x2 linear system relaxes exponentially to its balance
        rho = r1 + r2
        g1 = g1f.values(rho, clamp=True)
        g2 = g2f.values(rho, clamp=True)
        k = (g1 + g2) / eps
        with np.errstate(invalid="ignore", divide="ignore"):
            balance = np.where(k > 0, g2 * rho / (eps * np.where(k > 0, k, 1.0)), r1)
        r1[:] = balance + (r1 - balance) * np.exp(-k * h)
        r2[:] = rho - r1

    def grow_exact(r1, r2, h):
        if not growth:
            return
        # rho2' = rho2 (K - rho2) with K = 1 - rho1 held fixed
        cap = 1.0 - r1
        kh = cap * h
        with np.errstate(invalid="ignore", divide="ignore"):
            phi = np.where(np.abs(cap) > 1e-12, np.expm1(kh) / np.where(np.abs(cap) > 1e-12, cap, 1.0), h)
        r2[:] = r2 * np.exp(kh) / (1.0 + r2 * phi)

    def strang(arrays, h):
        r1, r2 = arrays
        switch_exact(r1, r2, 0.5 * h)
        grow_exact(r1, r2, 0.5 * h)
        _laplacian(r1, dx, lap)
        r1 += h * lap
        grow_exact(r1, r2, 0.5 * h)
        switch_exact(r1, r2, 0.5 * h)

    state = make_initial(config.initial, config.grid, "full")
    return _run(config, state, euler if config.scheme == "euler" else strang, ("rho1", "rho2"))


def simulate_reduced(config: SimulationConfig) -> Trajectory:
    """Integrate the single-density equation in conservative flux form.

    ``flux="mean"`` uses the arithmetic mean of D at the two cells sharing a
    face. ``flux="potential"`` differences the balance density
    ``Phi(rho) = Gamma2 rho / (Gamma1 + Gamma2)`` (so ``Phi' = D``), which is
    exactly what the two-species scheme reduces to as epsilon -> 0.
    """
    if config.model != "reduced":
        raise ConfigError("simulate_reduced needs model = 'reduced'")
    table = coefficient_table(config.pair, config.table_samples)
    phi = np.asarray(equilibrium_fractions(config.pair, table.rho)[0])
    dx = config.grid.dx
    growth = config.growth
    potential = config.flux == "potential"
    flux = np.empty(config.grid.n_cells + 1)
    flux[0] = flux[-1] = 0.0

    def euler(arrays, h):
        (rho,) = arrays
        if potential:
            flux[1:-1] = np.diff(np.interp(rho, table.rho, phi)) / dx
        else:
            d = table.D(rho)
            flux[1:-1] = 0.5 * (d[1:] + d[:-1]) * np.diff(rho) / dx
        div = np.diff(flux) / dx
        if growth:
            rho += h * (div + table.r(rho) * rho)
        else:
            rho += h * div

    state = make_initial(config.initial, config.grid, "reduced")
    return _run(config, state, euler, ("rho",))


def simulate(config: SimulationConfig) -> Trajectory:
    return simulate_full(config) if config.model == "full" else simulate_reduced(config)


def sup_distance(a: Trajectory, b: Trajectory, index: int = -1) -> float:
    """Max-norm gap between the total densities of two runs at one snapshot."""
    if a.grid != b.grid:
        raise ValueError("trajectories live on different grids")
    return float(np.max(np.abs(a.total[index] - b.total[index])))


@dataclass(frozen=True)
class ConvergenceReport:
    epsilons: tuple[float, ...]
    distances: tuple[float, ...]
    monotone: Optional[bool]  # None for a single epsilon


def compare_fast_switching(
    pair: SwitchingPair, eps_list: Sequence[float], config: SimulationConfig, flux: str = "potential"
) -> ConvergenceReport:
    """Distance at ``t_end`` between full runs at each epsilon and the reduced run.

    All runs share one time step (the most restrictive of the set), since a
    pulled front drifts by O(dt) per unit time and would otherwise mask the
    O(epsilon) gap being measured.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ConfigError("epsilon list must be nonempty and positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("epsilon list must be strictly decreasing")
    base = replace(config, output_times=[config.t_end])
    red_cfg = replace(base, pair=pair.with_epsilon(1.0), model="reduced", flux=flux)
    full_cfgs = [replace(base, pair=pair.with_epsilon(e), model="full") for e in eps_list]
    dt = min(stable_dt(c) for c in [red_cfg, *full_cfgs])
    reduced = simulate_reduced(replace(red_cfg, dt=dt))
    distances = [sup_distance(simulate_full(replace(c, dt=dt)), reduced) for c in full_cfgs]
    monotone = None
    if len(distances) > 1:
        monotone = all(b < a for a, b in zip(distances, distances[1:]))
    return ConvergenceReport(tuple(eps_list), tuple(distances), monotone)
