"""Density-dependent phenotypic switching rates.

``Gamma1`` converts the diffusing (invasive) species into the proliferating
one, ``Gamma2`` does the reverse. Both depend only on the total density.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ConfigError, DomainError, InvalidPairError

FAMILIES = ("constant", "linear", "linear_decay", "hill", "hill_decay", "table")

# parameters accepted in config records, per family
_FAMILY_PARAMS = {
    "constant": ("a",),
    "linear": ("b",),
    "linear_decay": ("a",),
    "hill": ("b", "K", "n"),
    "hill_decay": ("a", "K", "n"),
    "table": ("rho", "values"),
}


def _hill_fraction(rho, K, n):
    # rho**n / (K**n + rho**n), defined as 0 at rho = 0 even when K = 0
    r = np.maximum(rho, 0.0)
    rn = r**n
    den = K**n + rn
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, rn / np.where(den > 0, den, 1.0), 0.0)
    return out


def _hill_fraction_derivative(rho, K, n):
    r = np.maximum(rho, 0.0)
    Kn = K**n
    den = (Kn + r**n) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        num = n * Kn * r ** (n - 1.0)
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return out


@dataclass(frozen=True)
class SwitchingFunction:
    """One switching rate Gamma(rho).

    Use the classmethod constructors rather than the raw fields; ``family``
    selects which of ``a``, ``b``, ``K``, ``n`` are meaningful.
    """

    family: str
    a: float = 0.0
    b: float = 0.0
    K: float = 0.0
    n: float = 1.0
    table_rho: tuple[float, ...] = field(default=(), repr=False)
    table_values: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown switching family {self.family!r}")
        for name in ("a", "b", "K", "n"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{self.family}: parameter {name} must be a nonnegative real, got {value}")
        if self.family in ("hill", "hill_decay") and self.n < 1:
            raise ValueError("Hill exponent n must be >= 1")
        if self.family == "table":
            rho = np.asarray(self.table_rho, dtype=float)
            vals = np.asarray(self.table_values, dtype=float)
            if rho.ndim != 1 or rho.size < 2 or rho.shape != vals.shape:
                raise ValueError("table family needs matching rho/values arrays of length >= 2")
            if np.any(np.diff(rho) <= 0):
                raise ValueError("table rho samples must be strictly increasing")
            if np.any(vals < 0) or not np.all(np.isfinite(vals)):
                raise ValueError("table values must be finite and nonnegative")

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, a: float) -> SwitchingFunction:
        return cls("constant", a=float(a))

    @classmethod
    def linear(cls, b: float) -> SwitchingFunction:
        return cls("linear", b=float(b))

    @classmethod
    def linear_decay(cls, a: float) -> SwitchingFunction:
        return cls("linear_decay", a=float(a))

    @classmethod
    def hill(cls, b: float, K: float, n: float) -> SwitchingFunction:
        return cls("hill", b=float(b), K=float(K), n=float(n))

    @classmethod
    def hill_decay(cls, a: float, K: float, n: float) -> SwitchingFunction:
        return cls("hill_decay", a=float(a), K=float(K), n=float(n))

    @classmethod
    def tabulated(cls, rho, values) -> SwitchingFunction:
        """Piecewise-linear rate through user samples, held constant outside them."""
        return cls(
            "table",
            table_rho=tuple(float(v) for v in rho),
            table_values=tuple(float(v) for v in values),
        )

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> SwitchingFunction:
        """Build from a config record such as ``{"family": "hill", "b": 1.5, "K": 0.5, "n": 2}``."""
        record = dict(record)
        family = record.pop("family", None)
        if family not in _FAMILY_PARAMS:
            raise ConfigError(f"switching family must be one of {list(_FAMILY_PARAMS)}, got {family!r}")
        allowed = _FAMILY_PARAMS[family]
        unknown = sorted(set(record) - set(allowed))
        if unknown:
            raise ConfigError(f"unknown key(s) {unknown} for switching family {family!r}; allowed {list(allowed)}")
        missing = [k for k in allowed if k not in record]
        if missing:
            raise ConfigError(f"switching family {family!r} is missing {missing}")
        try:
            if family == "table":
                return cls.tabulated(record["rho"], record["values"])
            return getattr(cls, family)(*(record[k] for k in allowed))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"switching family {family!r}: {exc}") from exc

    def to_record(self) -> dict[str, Any]:
        if self.family == "table":
            return {"family": "table", "rho": list(self.table_rho), "values": list(self.table_values)}
        return {"family": self.family, **{k: getattr(self, k) for k in _FAMILY_PARAMS[self.family]}}

    # -- evaluation ---------------------------------------------------
    def values(self, rho, clamp: bool = False):
        """Vectorised Gamma(rho) with no input checks (solver hot path).

        ``clamp`` floors the decaying families at zero, which only matters
        for overshoot above rho = 1.
        """
        rho = np.asarray(rho, dtype=float)
        fam = self.family
        if fam == "constant":
            out = np.full_like(rho, self.a)
        elif fam == "linear":
            out = self.b * rho
        elif fam == "linear_decay":
            out = self.a * (1.0 - rho)
            if clamp:
                out = np.maximum(out, 0.0)
        elif fam == "hill":
            out = self.b * _hill_fraction(rho, self.K, self.n)
        elif fam == "hill_decay":
            out = self.a * (1.0 - _hill_fraction(rho, self.K, self.n))
            if clamp:
                out = np.maximum(out, 0.0)
        else:
            out = np.interp(rho, self.table_rho, self.table_values)
        return out

    def derivative_values(self, rho):
        rho = np.asarray(rho, dtype=float)
        fam = self.family
        if fam == "constant":
            return np.zeros_like(rho)
        if fam == "linear":
            return np.full_like(rho, self.b)
        if fam == "linear_decay":
            return np.full_like(rho, -self.a)
        if fam == "hill":
            return self.b * _hill_fraction_derivative(rho, self.K, self.n)
        if fam == "hill_decay":
            return -self.a * _hill_fraction_derivative(rho, self.K, self.n)
        xs = np.asarray(self.table_rho)
        slopes = np.diff(self.table_values) / np.diff(xs)
        idx = np.clip(np.searchsorted(xs, rho, side="right") - 1, 0, len(slopes) - 1)
        inside = (rho >= xs[0]) & (rho <= xs[-1])
        return np.where(inside, slopes[idx], 0.0)

    def __call__(self, rho):
        rho = _checked(rho)
        out = self.values(rho)
        return float(out) if out.ndim == 0 else out

    def derivative(self, rho):
        rho = _checked(rho)
        out = self.derivative_values(rho)
        return float(out) if out.ndim == 0 else out

    @property
    def is_constant(self) -> bool:
        return self.family == "constant"


def _checked(rho):
    arr = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("switching rate evaluated at a non-finite density")
    return arr


def evaluate(f: SwitchingFunction, rho):
    return f(rho)


def evaluate_derivative(f: SwitchingFunction, rho):
    return f.derivative(rho)


@dataclass(frozen=True)
class SwitchingPair:
    """The rates (Gamma1, Gamma2) and the fast-switching scale ``epsilon``.

    The solver divides both rates by ``epsilon``; analysis routines use the
    unscaled functions.
    """

    gamma1: SwitchingFunction
    gamma2: SwitchingFunction
    epsilon: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError("epsilon must be a positive real")

    @property
    def gamma1_at_zero(self) -> float:
        return float(self.gamma1.values(0.0))

    @property
    def gamma2_at_zero(self) -> float:
        return float(self.gamma2.values(0.0))

    def rates_at_zero(self) -> tuple[float, float]:
        """``(gamma1, gamma2) = (Gamma1(0), Gamma2(0))``, the leading-edge rates."""
        return self.gamma1_at_zero, self.gamma2_at_zero

    def with_epsilon(self, epsilon: float) -> SwitchingPair:
        return SwitchingPair(self.gamma1, self.gamma2, float(epsilon))

    @property
    def is_constant(self) -> bool:
        return self.gamma1.is_constant and self.gamma2.is_constant

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> SwitchingPair:
        unknown = sorted(set(record) - {"gamma1", "gamma2", "epsilon"})
        if unknown:
            raise ConfigError(f"unknown key(s) {unknown} in switching section")
        if "gamma1" not in record or "gamma2" not in record:
            raise ConfigError("switching section needs both gamma1 and gamma2")
        eps = record.get("epsilon", 1.0)
        if not isinstance(eps, (int, float)) or isinstance(eps, bool) or not eps > 0:
            raise ConfigError(f"switching.epsilon must be a positive number, got {eps!r}")
        return cls(
            SwitchingFunction.from_record(record["gamma1"]),
            SwitchingFunction.from_record(record["gamma2"]),
            float(eps),
        )

    def to_record(self) -> dict[str, Any]:
        return {"gamma1": self.gamma1.to_record(), "gamma2": self.gamma2.to_record(), "epsilon": self.epsilon}


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    gamma1_nonnegative: bool
    gamma2_nonnegative: bool
    gamma1_nonincreasing: bool
    gamma2_nondecreasing: bool
    sum_positive: bool
    gamma1_zero: float
    gamma2_zero: float
    degenerate: bool
    warnings: tuple[str, ...] = ()


def validate_pair(pair: SwitchingPair, samples: int = 1001, tol: float = 1e-12) -> ValidationReport:
    """Sample both rates on [0, 1] and check the standing assumptions.

    A vanishing ``Gamma1 + Gamma2`` is an error. Monotonicity violations
    only produce warnings, since the analysis holds for general rates.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    rho = np.linspace(0.0, 1.0, int(samples))
    g1 = pair.gamma1.values(rho)
    g2 = pair.gamma2.values(rho)
    total = g1 + g2
    bad = np.flatnonzero(total <= 0)
    if bad.size:
        raise InvalidPairError(f"Gamma1 + Gamma2 = 0 at rho = {rho[bad[0]]:.6g}; the reduced model is undefined there")

    notes = []
    nonneg1 = bool(np.all(g1 >= -tol))
    nonneg2 = bool(np.all(g2 >= -tol))
    if not nonneg1:
        notes.append("Gamma1 takes negative values on [0, 1]")
    if not nonneg2:
        notes.append("Gamma2 takes negative values on [0, 1]")
    dec1 = bool(np.all(np.diff(g1) <= tol))
    inc2 = bool(np.all(np.diff(g2) >= -tol))
    if not dec1:
        notes.append("Gamma1 is not non-increasing on [0, 1]")
    if not inc2:
        notes.append("Gamma2 is not non-decreasing on [0, 1]")
    for msg in notes:
        warnings.warn(msg, stacklevel=2)

    gz1, gz2 = pair.rates_at_zero()
    return ValidationReport(
        valid=nonneg1 and nonneg2,
        gamma1_nonnegative=nonneg1,
        gamma2_nonnegative=nonneg2,
        gamma1_nonincreasing=dec1,
        gamma2_nondecreasing=inc2,
        sum_positive=True,
        gamma1_zero=gz1,
        gamma2_zero=gz2,
        degenerate=gz2 == 0.0,
        warnings=tuple(notes),
    )


# Pairs used in the four profile figures (panels a-d).
FIGURE_PAIRS = {
    "fig1a": SwitchingPair(SwitchingFunction.constant(0.5), SwitchingFunction.constant(1.0)),
    "fig1b": SwitchingPair(SwitchingFunction.constant(0.5), SwitchingFunction.linear(1.5)),
    "fig1c": SwitchingPair(SwitchingFunction.linear_decay(0.5), SwitchingFunction.linear(1.5)),
    "fig1d": SwitchingPair(SwitchingFunction.hill_decay(0.5, 0.5, 2), SwitchingFunction.hill(1.5, 0.5, 2)),
}
