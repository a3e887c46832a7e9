"""Fast-switching reduction to a single equation for the total density.

In the limit of fast switching the two species sit at the local balance
``rho1 * Gamma1 = rho2 * Gamma2`` and the total density obeys

    d_t rho = d_x (D(rho) d_x rho) + r(rho) rho

with ``D`` and ``r`` computed below.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidPairError, NotApplicableError
from .switching import SwitchingPair


def _rates(pair: SwitchingPair, rho):
    rho = np.asarray(rho, dtype=float)
    g1 = pair.gamma1.values(rho)
    g2 = pair.gamma2.values(rho)
    total = g1 + g2
    if np.any(total == 0):
        raise InvalidPairError("Gamma1 + Gamma2 = 0; reduced coefficients are undefined")
    return rho, g1, g2, total


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def equilibrium_fractions(pair: SwitchingPair, rho):
    """Split a total density into its (rho1, rho2) switching balance."""
    rho, g1, g2, total = _rates(pair, rho)
    rho1 = g2 * rho / total
    return _out(rho1), _out(rho - rho1)


def effective_diffusion(pair: SwitchingPair, rho, derivatives: Optional[tuple] = None):
    """D(rho) = d/drho [Gamma2 rho / (Gamma1 + Gamma2)].

    ``derivatives`` overrides the analytic (Gamma1', Gamma2') with
    caller-supplied values, e.g. finite differences.
    """
    rho, g1, g2, total = _rates(pair, rho)
    if derivatives is None:
        d1 = pair.gamma1.derivative_values(rho)
        d2 = pair.gamma2.derivative_values(rho)
    else:
        d1, d2 = derivatives
    return _out((g1 * d2 - d1 * g2) * rho / total**2 + g2 / total)


def effective_rate(pair: SwitchingPair, rho):
    """Per-capita growth r(rho) = Gamma1 (1 - rho) / (Gamma1 + Gamma2)."""
    rho, g1, g2, total = _rates(pair, rho)
    return _out(g1 * (1.0 - rho) / total)


def fkpp_theta(pair: SwitchingPair) -> float:
    """Diffusion fraction theta = Gamma2 / (Gamma1 + Gamma2) of a constant pair."""
    if not pair.is_constant:
        raise NotApplicableError("theta is only defined for constant switching rates")
    g1, g2 = pair.gamma1.a, pair.gamma2.a
    if g1 + g2 == 0:
        raise InvalidPairError("Gamma1 + Gamma2 = 0")
    return g2 / (g1 + g2)


def small_density_slope(pair: SwitchingPair) -> float:
    """Leading coefficient of D(rho) ~ slope * rho when Gamma2(0) = 0."""
    g1, g2 = pair.rates_at_zero()
    if g2 != 0:
        raise NotApplicableError("D(rho) is not degenerate: Gamma2(0) != 0")
    if g1 == 0:
        raise NotApplicableError("Gamma1(0) = 0: the slope 2 Gamma2'(0) / Gamma1(0) is undefined")
    return 2.0 * float(pair.gamma2.derivative_values(0.0)) / g1


@dataclass(frozen=True)
class ReducedCoefficients:
    diffusion: Callable
    rate: Callable
    theta: Optional[float] = None


def reduced_coefficients(pair: SwitchingPair) -> ReducedCoefficients:
    theta = fkpp_theta(pair) if pair.is_constant else None
    return ReducedCoefficients(
        diffusion=lambda rho: effective_diffusion(pair, rho),
        rate=lambda rho: effective_rate(pair, rho),
        theta=theta,
    )


@dataclass(frozen=True)
class CoefficientTable:
    """D and r sampled on a uniform density grid, read back by linear interpolation."""

    rho: np.ndarray
    diffusion: np.ndarray
    rate: np.ndarray

    def D(self, rho):
        return np.interp(rho, self.rho, self.diffusion)

    def r(self, rho):
        return np.interp(rho, self.rho, self.rate)


def coefficient_table(pair: SwitchingPair, samples: int = 4096, rho_max: float = 1.05) -> CoefficientTable:
    rho = np.linspace(0.0, rho_max, samples)
    return CoefficientTable(rho, np.asarray(effective_diffusion(pair, rho)), np.asarray(effective_rate(pair, rho)))
