import numpy as np
import pytest
import sympy as sp

from goorgrow.errors import InvalidPairError, NotApplicableError
from goorgrow.reduced import (
    coefficient_table,
    effective_diffusion,
    effective_rate,
    equilibrium_fractions,
    fkpp_theta,
    reduced_coefficients,
    small_density_slope,
)
from goorgrow.switching import FIGURE_PAIRS, SwitchingFunction as SF, SwitchingPair

from conftest import constant_pair

SHIPPED = dict(FIGURE_PAIRS)
SHIPPED.update({f"lin{b}": SwitchingPair(SF.constant(0.5), SF.linear(b)) for b in (0.5, 1.0, 1.5)})
SHIPPED.update({f"hill{b}": SwitchingPair(SF.hill_decay(0.5, 0.5, 2), SF.hill(b, 0.5, 2)) for b in (0.5, 1.0, 1.5)})


def _symbolic_diffusion(g1_expr, g2_expr):
    # oracle: D = d/drho of the balance density Gamma2 rho / (Gamma1 + Gamma2)
    rho = sp.Symbol("rho")
    phi = g2_expr(rho) * rho / (g1_expr(rho) + g2_expr(rho))
    return sp.lambdify(rho, sp.diff(phi, rho), "numpy")


def test_equilibrium_fraction_examples():
    assert equilibrium_fractions(constant_pair(1, 1), 0.8) == pytest.approx((0.4, 0.4))
    r1, r2 = equilibrium_fractions(constant_pair(0.5, 1), 1.0)
    assert (r1, r2) == pytest.approx((2 / 3, 1 / 3), rel=1e-15)
    for pair in SHIPPED.values():
        assert equilibrium_fractions(pair, 0.0) == (0.0, 0.0)


def test_fractions_sum_to_total():
    rho = np.linspace(0, 1.05, 301)
    for pair in SHIPPED.values():
        r1, r2 = equilibrium_fractions(pair, rho)
        assert np.allclose(r1 + r2, rho, rtol=0, atol=1e-15)


def test_fractions_balance_switching():
    rho = np.linspace(0.01, 1, 50)
    for pair in SHIPPED.values():
        r1, r2 = equilibrium_fractions(pair, rho)
        assert np.allclose(r1 * pair.gamma1(rho), r2 * pair.gamma2(rho), atol=1e-14)


def test_diffusion_examples():
    assert effective_diffusion(constant_pair(0.5, 1), 0.37) == pytest.approx(2 / 3, rel=1e-15)
    assert effective_diffusion(FIGURE_PAIRS["fig1b"], 0.0) == 0.0
    # hand-evaluated: D = (1.5 rho + 2.25 rho^2) / (0.5 + 1.5 rho)^2 at rho = 0.1
    assert effective_diffusion(FIGURE_PAIRS["fig1b"], 0.1) == pytest.approx(0.1725 / 0.4225, rel=1e-14)


@pytest.mark.parametrize(
    "name, g1, g2",
    [
        ("fig1b", lambda r: sp.Rational(1, 2), lambda r: sp.Rational(3, 2) * r),
        ("fig1c", lambda r: sp.Rational(1, 2) * (1 - r), lambda r: sp.Rational(3, 2) * r),
        (
            "fig1d",
            lambda r: sp.Rational(1, 2) * (1 - r**2 / (sp.Rational(1, 4) + r**2)),
            lambda r: sp.Rational(3, 2) * r**2 / (sp.Rational(1, 4) + r**2),
        ),
    ],
)
def test_diffusion_matches_symbolic_oracle(name, g1, g2):
    oracle = _symbolic_diffusion(g1, g2)
    rho = np.linspace(0.0, 1.05, 211)
    assert np.allclose(effective_diffusion(FIGURE_PAIRS[name], rho), oracle(rho), rtol=1e-12, atol=1e-14)


def test_rate_examples():
    for pair in SHIPPED.values():
        assert effective_rate(pair, 1.0) == 0.0
    assert effective_rate(constant_pair(0.5, 1), 0.0) == pytest.approx(1 / 3, rel=1e-15)
    assert effective_rate(SwitchingPair(SF.constant(0.7), SF.linear(2.0)), 0.0) == 1.0


def test_constant_pair_reduces_to_fkpp():
    pair = constant_pair(0.5, 1)
    theta = fkpp_theta(pair)
    rho = np.linspace(0, 1, 11)
    assert np.allclose(effective_diffusion(pair, rho), theta)
    assert np.allclose(effective_rate(pair, rho), (1 - theta) * (1 - rho))
    assert reduced_coefficients(pair).theta == theta


def test_theta_examples():
    assert fkpp_theta(constant_pair(0.5, 1)) == pytest.approx(2 / 3)
    assert fkpp_theta(constant_pair(1, 1)) == 0.5
    with pytest.raises(NotApplicableError):
        fkpp_theta(FIGURE_PAIRS["fig1b"])


def test_small_density_slope_examples():
    assert small_density_slope(FIGURE_PAIRS["fig1b"]) == pytest.approx(6.0)
    assert small_density_slope(SwitchingPair(SF.constant(0.5), SF.hill(1.5, 0.5, 2))) == 0.0
    with pytest.raises(NotApplicableError):
        small_density_slope(FIGURE_PAIRS["fig1a"])
    with pytest.raises(NotApplicableError):
        small_density_slope(SwitchingPair(SF.linear(1.0), SF.linear(1.0)))


def test_slope_matches_forward_difference():
    pair = FIGURE_PAIRS["fig1b"]
    h = 1e-4
    fd = (effective_diffusion(pair, h) - effective_diffusion(pair, 0.0)) / h
    assert fd == pytest.approx(small_density_slope(pair), rel=1e-2)


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_structure_for_nonincreasing_gamma1(name):
    pair = SHIPPED[name]
    rho = np.linspace(0, 1, 1000)
    assert np.all(effective_diffusion(pair, rho) >= -1e-12)
    assert np.all(np.diff(effective_rate(pair, rho)) <= 1e-10)


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_analytic_and_finite_difference_coefficients_agree(name):
    pair = SHIPPED[name]
    rho = np.linspace(0.02, 0.98, 97)
    h = 1e-6
    d1 = (pair.gamma1(rho + h) - pair.gamma1(rho - h)) / (2 * h)
    d2 = (pair.gamma2(rho + h) - pair.gamma2(rho - h)) / (2 * h)
    exact = effective_diffusion(pair, rho)
    fd = effective_diffusion(pair, rho, derivatives=(d1, d2))
    assert np.all(np.abs(fd - exact) <= 1e-5 * np.maximum(np.abs(exact), 1e-3))


def test_vanishing_denominator_raises():
    pair = SwitchingPair(SF.linear_decay(0.5), SF.linear(0.0))
    with pytest.raises(InvalidPairError):
        effective_diffusion(pair, 1.0)
    with pytest.raises(InvalidPairError):
        effective_rate(pair, 1.0)
    with pytest.raises(InvalidPairError):
        equilibrium_fractions(pair, 1.0)


def test_table_interpolates_point_values():
    pair = FIGURE_PAIRS["fig1d"]
    table = coefficient_table(pair)
    rho = np.linspace(0, 1.0, 37)
    assert np.allclose(table.D(rho), effective_diffusion(pair, rho), atol=1e-5)
    assert np.allclose(table.r(rho), effective_rate(pair, rho), atol=1e-6)
    # rho above capacity uses the raw formula: negative growth
    assert table.r(1.04) < 0
