"""Travelling-wave analysis: steady states, dispersion relation, speeds.

Linearising at the invaded-into state with ``gamma_i = Gamma_i(0)`` and
profiles ~ exp(-sigma z) gives the speed of a front with leading-edge
decay rate ``sigma``:

    c(sigma) = (f + sqrt(f^2 - 4 (1 - gamma2) + 4 gamma1 / sigma^2)) / 2,
    f(sigma) = sigma + (1 - gamma1 - gamma2) / sigma.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from .errors import ContaminatedMeasurementError, DomainError, InvalidPairError, NoFrontError, NotApplicableError
from .solver import BOUNDARY_FRACTION, BOUNDARY_LEVEL, Trajectory
from .switching import SwitchingPair

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

SCAN_RANGE = (1e-3, 1e3)
SCAN_POINTS = 600
SIGMA_FLOOR = 1e-12
DEFAULT_THRESHOLD = 0.1


# ---------------------------------------------------------------- steady states

@dataclass(frozen=True)
class RearState:
    u1: float
    u2: float
    kind: str  # "extinct_proliferation" or "coexistence"

    @property
    def total(self) -> float:
        return self.u1 + self.u2


@dataclass(frozen=True)
class SteadyStateSet:
    front: tuple[float, float]
    rear: tuple[RearState, ...]


def _bisect(fn, lo, hi, tol=1e-15, max_iter=200):
    """Boundary between fn > 0 (at lo) and fn <= 0 (at hi)."""
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def steady_states(pair: SwitchingPair) -> SteadyStateSet:
    """Origin plus the states that can sit behind an invading front."""
    g1 = lambda u: float(pair.gamma1.values(u))
    g2 = lambda u: float(pair.gamma2.values(u))
    rear = []
    lo, hi = 1e-6, 1.0
    if g1(lo) <= 0:
        rear.append(RearState(lo, 0.0, "extinct_proliferation"))
    elif g1(hi) <= 0:
        root = 1.0 if g1(1.0) == 0 and g1(1.0 - 1e-12) > 0 else _bisect(g1, lo, hi)
        rear.append(RearState(root, 0.0, "extinct_proliferation"))
    else:
        s = g1(1.0) + g2(1.0)
        if s == 0:
            raise InvalidPairError("Gamma1(1) + Gamma2(1) = 0; the coexistence state is undefined")
        rear.append(RearState(g2(1.0) / s, g1(1.0) / s, "coexistence"))
    return SteadyStateSet((0.0, 0.0), tuple(rear))


# ------------------------------------------------------------ dispersion relation

@dataclass(frozen=True)
class DispersionPoint:
    sigma: float
    f: float
    c: float


@dataclass(frozen=True)
class DispersionMinimum:
    sigma_star: float
    c_min: float
    method: str  # "explicit" or "numeric"
    converged: bool = True


def _check_rates(gamma1, gamma2):
    if not (np.isfinite(gamma1) and np.isfinite(gamma2)) or gamma1 < 0 or gamma2 < 0:
        raise DomainError(f"switching rates at zero density must be finite and >= 0, got ({gamma1}, {gamma2})")


def dispersion_curve(gamma1: float, gamma2: float, sigma):
    """Vectorised c(sigma); returns (f, c)."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(~(sigma > 0)):
        raise DomainError("sigma must be positive")
    f = sigma + (1.0 - gamma1 - gamma2) / sigma
    # f^2 - 4 (1 - gamma2) + 4 gamma1 / sigma^2, rewritten as a sum of squares:
    # the direct form cancels catastrophically near sigma = 1 for small rates
    disc = (sigma - (1.0 + gamma1 - gamma2) / sigma) ** 2 + 4.0 * gamma1 * gamma2 / sigma**2
    if np.any(~(disc >= 0)):
        raise ArithmeticError("invalid discriminant in the dispersion relation")
    c = 0.5 * (f + np.sqrt(disc))
    return f, c


def dispersion_speed(gamma1: float, gamma2: float, sigma: float) -> DispersionPoint:
    _check_rates(gamma1, gamma2)
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    f, c = dispersion_curve(gamma1, gamma2, sigma)
    return DispersionPoint(float(sigma), float(f), float(c))


def dispersion_slope_at_one(gamma1: float, gamma2: float) -> float:
    """dc/dsigma at sigma = 1, where c = 1 for every pair of rates."""
    _check_rates(gamma1, gamma2)
    if gamma1 + gamma2 == 0:
        raise DomainError("gamma1 + gamma2 must be positive")
    return (gamma2 - gamma1) / (gamma1 + gamma2)


def golden_section(fn, lo: float, hi: float, rtol: float = 1e-10, max_iter: int = 500) -> float:
    """Minimiser of a unimodal ``fn`` on [lo, hi], to relative width ``rtol``."""
    a, b = lo, hi
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(max_iter):
        if b - a <= rtol * 0.5 * (a + b):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INVPHI * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INVPHI * (b - a)
            f2 = fn(x2)
    return x1 if f1 <= f2 else x2


def cmin_explicit(gamma1: float, gamma2: float) -> DispersionMinimum:
    """Closed-form minimum speed on the axes gamma1 = 0 or gamma2 = 0.

    For gamma1 = 0 and gamma2 >= 1 the infimum 0 is approached as
    sigma -> 0 and ``sigma_star`` is reported as 0.
    """
    _check_rates(gamma1, gamma2)
    if gamma2 == 0:
        s = math.sqrt(1.0 + gamma1)
        return DispersionMinimum(s, 1.0 / s, "explicit")
    if gamma1 == 0:
        if gamma2 < 1:
            s = math.sqrt(1.0 - gamma2)
            return DispersionMinimum(s, s, "explicit")
        return DispersionMinimum(0.0, 0.0, "explicit")
    raise NotApplicableError("no closed form when both gamma1 and gamma2 are positive; use minimize_dispersion")


def minimize_dispersion(gamma1: float, gamma2: float, method: Optional[str] = None) -> DispersionMinimum:
    """Minimum of c(sigma) over sigma > 0.

    Uses the closed form on the axes unless ``method="numeric"``; otherwise a
    log-spaced scan brackets the minimiser and golden-section refines it.
    """
    _check_rates(gamma1, gamma2)
    if method not in (None, "numeric", "explicit"):
        raise ValueError(f"unknown method {method!r}")
    if method == "explicit" or (method is None and (gamma1 == 0 or gamma2 == 0)):
        return cmin_explicit(gamma1, gamma2)

    lo, hi = SCAN_RANGE
    speed = lambda s: float(dispersion_curve(gamma1, gamma2, s)[1])
    converged = True
    while True:
        grid = np.geomspace(lo, hi, SCAN_POINTS)
        c = dispersion_curve(gamma1, gamma2, grid)[1]
        i = int(np.argmin(c))
        if i > 0 or lo <= SIGMA_FLOOR:
            break
        # infimum sits at sigma -> 0 (only possible when gamma1 = 0); chase it down
        hi, lo = grid[1], max(lo * 1e-3, SIGMA_FLOOR)
    if i == 0:
        warnings.warn("dispersion minimum not bracketed; reporting the lower scan end", stacklevel=2)
        return DispersionMinimum(float(grid[0]), float(c[0]), "numeric", converged=False)
    if i == len(grid) - 1:
        warnings.warn("dispersion minimum not bracketed; reporting the upper scan end", stacklevel=2)
        return DispersionMinimum(float(grid[-1]), float(c[-1]), "numeric", converged=False)
    # near-kinked curves (tiny rates) need the bracket shrunk to roundoff, well past 1e-10
    s = golden_section(speed, float(grid[i - 1]), float(grid[i + 1]), rtol=1e-15)
    return DispersionMinimum(s, speed(s), "numeric", converged)


def fkpp_cmin(theta: float) -> float:
    """Minimum speed 2 sqrt(theta (1 - theta)) of the scaled FKPP equation."""
    if not 0 < theta < 1:
        raise DomainError("theta must lie in (0, 1)")
    return 2.0 * math.sqrt(theta * (1.0 - theta))


# ---------------------------------------------------------------- leading edge

@dataclass(frozen=True)
class LeadingEdge:
    c: float
    lam: float
    positive: bool


_EDGE_TOL = 4 * np.finfo(float).eps


def leading_edge(c: float, gamma1: float) -> LeadingEdge:
    """Decay rate of the linearised edge when Gamma2(0) = 0, and whether the
    resulting profile is positive (c * lambda(c) > 1)."""
    if not c >= 0:
        raise DomainError("wave speed must be >= 0")
    if not gamma1 >= 0:
        raise DomainError("gamma1 must be >= 0")
    # hypot keeps lambda = c when gamma1 = 0 even if c * c underflows
    lam = 0.5 * (c + math.hypot(c, 2.0 * math.sqrt(gamma1)))
    margin = c * lam - 1.0
    positive = bool(margin > _EDGE_TOL)
    c_bound = 1.0 / math.sqrt(1.0 + gamma1)
    if abs(c - c_bound) > 1e-12 * max(1.0, c):
        assert positive == (c > c_bound), "positivity flag disagrees with the closed-form threshold"
    return LeadingEdge(c, lam, positive)


def positivity_threshold(gamma1: float, tol: float = 1e-13) -> float:
    """Bisect the positivity flag of :func:`leading_edge` for its flip speed."""
    lo, hi = 0.0, 1.0
    while not leading_edge(hi, gamma1).positive:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if leading_edge(mid, gamma1).positive:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ------------------------------------------------------------- speed estimators

@dataclass(frozen=True)
class SpeedEstimate:
    value: float
    method: str  # "reaction_integral" or "front_tracking"
    window: tuple[float, float]
    dispersion_stddev: float
    n_snapshots: int
    rear_settled: Optional[bool] = None
    rear_state: Optional[tuple[float, float]] = None
    notes: tuple[str, ...] = field(default=())

    @property
    def relative_spread(self) -> float:
        if self.dispersion_stddev == 0:
            return 0.0
        return self.dispersion_stddev / abs(self.value) if self.value else math.inf

    @property
    def converged(self) -> bool:
        return self.relative_spread < 0.01

    def as_row(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "t_start": self.window[0],
            "t_end": self.window[1],
            "dispersion_stddev": self.dispersion_stddev,
            "relative_spread": self.relative_spread,
            "converged": self.converged,
            "n_snapshots": self.n_snapshots,
        }


def _window(times: np.ndarray, minimum: int) -> np.ndarray:
    t0 = times[0] + 2.0 / 3.0 * (times[-1] - times[0])
    idx = np.flatnonzero(times >= t0 - 1e-9)
    if idx.size < minimum:
        idx = np.arange(max(0, len(times) - minimum), len(times))
    return idx


def _check_boundary(trajectory: Trajectory, idx):
    grid = trajectory.grid
    edge = grid.x >= (1.0 - BOUNDARY_FRACTION) * grid.length
    if np.any(trajectory.total[idx][:, edge] > BOUNDARY_LEVEL):
        raise ContaminatedMeasurementError("front within 10% of the right boundary; enlarge the domain or shorten the run")


def rear_plateau(trajectory: Trajectory, index: int = -1, fraction: float = 0.1):
    """Mean (rho1, rho2) and total-density range over the left ``fraction`` of the domain."""
    n = max(1, int(round(fraction * trajectory.grid.n_cells)))
    total = trajectory.total[index][:n]
    spread = float(np.max(total) - np.min(total))
    if trajectory.rho1 is None:
        return (float(np.mean(total)), float("nan")), spread
    return (float(np.mean(trajectory.rho1[index][:n])), float(np.mean(trajectory.rho2[index][:n]))), spread


def match_rear_state(plateau, pair: SwitchingPair, tol: float = 1e-2) -> Optional[RearState]:
    for state in steady_states(pair).rear:
        if abs(plateau[0] - state.u1) <= tol and abs(plateau[1] - state.u2) <= tol:
            return state
    return None


def speed_reaction_integral(trajectory: Trajectory, pair: Optional[SwitchingPair] = None) -> SpeedEstimate:
    """Front speed from the growth integral of rho2 (1 - rho) over the domain.

    With zero-flux ends this is the rate of change of total mass, which
    equals the speed of a wave whose rear sits at total density 1.
    """
    if trajectory.rho2 is None:
        raise ValueError("the reaction-integral estimator needs a full two-species trajectory")
    if len(trajectory) < 1:
        raise ValueError("empty trajectory")
    idx = _window(trajectory.times, 1)
    _check_boundary(trajectory, idx)
    x = trajectory.x
    per_snapshot = np.array([trapezoid(trajectory.rho2[i] * (1.0 - trajectory.total[i]), x) for i in idx])
    value = float(np.mean(per_snapshot))
    spread = float(np.std(per_snapshot))

    notes = []
    plateau, flat = rear_plateau(trajectory)
    settled = flat <= 1e-4
    if not settled:
        notes.append(f"rear not settled: total density varies by {flat:.2e} over the left 10% of the domain")
    matched = None
    if pair is not None and np.any(trajectory.total[-1] > BOUNDARY_LEVEL):
        state = match_rear_state(plateau, pair)
        if state is None:
            notes.append(f"rear plateau {plateau} matches no computed steady state")
        else:
            matched = (state.u1, state.u2)
    for msg in notes:
        warnings.warn(msg, stacklevel=2)
    return SpeedEstimate(
        value=value,
        method="reaction_integral",
        window=(float(trajectory.times[idx[0]]), float(trajectory.times[idx[-1]])),
        dispersion_stddev=spread,
        n_snapshots=int(idx.size),
        rear_settled=settled,
        rear_state=matched,
        notes=tuple(notes),
    )


def front_position(x: np.ndarray, profile: np.ndarray, threshold: float) -> float:
    """Rightmost point where ``profile`` drops through ``threshold`` (linear interpolation)."""
    above = np.flatnonzero(profile >= threshold)
    if above.size == 0:
        raise NoFrontError(f"density never reaches the threshold {threshold}")
    i = int(above[-1])
    if i == len(x) - 1:
        raise NoFrontError("threshold crossing lies beyond the right end of the domain")
    y0, y1 = profile[i], profile[i + 1]
    return float(x[i] + (y0 - threshold) / (y0 - y1) * (x[i + 1] - x[i]))


def speed_front_tracking(trajectory: Trajectory, threshold: float = DEFAULT_THRESHOLD) -> SpeedEstimate:
    """Least-squares slope of the level-crossing position against time."""
    if len(trajectory) < 3:
        raise ValueError("front tracking needs at least 3 snapshots")
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    idx = _window(trajectory.times, 3)
    _check_boundary(trajectory, idx)
    t = trajectory.times[idx]
    pos = np.array([front_position(trajectory.x, trajectory.total[i], threshold) for i in idx])
    slope, _ = np.polyfit(t, pos, 1)
    local = np.diff(pos) / np.diff(t)
    return SpeedEstimate(
        value=float(slope),
        method="front_tracking",
        window=(float(t[0]), float(t[-1])),
        dispersion_stddev=float(np.std(local)),
        n_snapshots=int(idx.size),
    )
