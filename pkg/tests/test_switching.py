import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goorgrow.errors import ConfigError, DomainError, InvalidPairError
from goorgrow.switching import (
    FIGURE_PAIRS,
    SwitchingFunction as SF,
    SwitchingPair,
    evaluate,
    evaluate_derivative,
    validate_pair,
)

ALL_FAMILIES = [
    SF.constant(0.5),
    SF.linear(1.5),
    SF.linear_decay(0.5),
    SF.hill(1.5, 0.5, 2),
    SF.hill_decay(0.5, 0.5, 2),
    SF.hill(2.0, 0.3, 3.5),
    SF.hill_decay(1.0, 0.7, 1),
]


def test_eval_examples():
    assert evaluate(SF.constant(0.5), 0.7) == 0.5
    assert evaluate(SF.hill(1.5, 0.5, 2), 0.0) == 0.0
    assert evaluate(SF.hill(1.5, 0.5, 2), 0.5) == pytest.approx(1.5 * 0.25 / 0.5, rel=1e-15)


def test_hill_with_zero_threshold_is_finite_at_zero():
    assert SF.hill(1.0, 0.0, 2)(0.0) == 0.0
    assert SF.hill(1.0, 0.0, 2)(0.3) == pytest.approx(1.0)


def test_eval_rejects_non_finite():
    with pytest.raises(DomainError):
        SF.constant(1.0)(float("nan"))
    with pytest.raises(DomainError):
        SF.linear(1.0).derivative(np.inf)


def test_derivative_examples():
    assert evaluate_derivative(SF.constant(0.5), 0.3) == 0.0
    assert evaluate_derivative(SF.linear(1.5), 0.0) == 1.5
    # d/drho of 1.5 rho^2 / (0.25 + rho^2) = 1.5 * 2 * 0.25 * rho / (0.25 + rho^2)^2
    assert evaluate_derivative(SF.hill(1.5, 0.5, 2), 0.5) == pytest.approx(1.5, rel=1e-14)
    h = 1e-6
    f = SF.hill(1.5, 0.5, 2)
    assert (f(0.5 + h) - f(0.5 - h)) / (2 * h) == pytest.approx(1.5, rel=1e-8)


@pytest.mark.parametrize("f", ALL_FAMILIES, ids=lambda f: f"{f.family}")
def test_derivative_matches_centered_difference(f):
    rho = np.linspace(0.01, 0.99, 197)
    h = 1e-6
    fd = (f(rho + h) - f(rho - h)) / (2 * h)
    exact = f.derivative(rho)
    scale = np.maximum(np.abs(exact), 1e-3)
    assert np.all(np.abs(fd - exact) / scale < 1e-5)


def test_tabulated_family_interpolates_and_slopes():
    f = SF.tabulated([0.0, 0.5, 1.0], [0.0, 1.0, 1.5])
    assert f(0.25) == pytest.approx(0.5)
    assert f(0.75) == pytest.approx(1.25)
    assert f.derivative(0.25) == pytest.approx(2.0)
    assert f.derivative(0.75) == pytest.approx(1.0)
    assert f.derivative(1.5) == 0.0


@given(rho=st.floats(0, 5), a=st.floats(0.01, 5), b=st.floats(0.01, 5), K=st.floats(0.05, 2), n=st.integers(1, 6))
def test_hill_pair_complementarity(rho, a, b, K, n):
    total = SF.hill_decay(a, K, n)(rho) + a / b * SF.hill(b, K, n)(rho)
    assert total == pytest.approx(a, rel=1e-12, abs=1e-12)


@given(rho=st.floats(0, 1), a=st.floats(0, 10), K=st.floats(0.01, 3), n=st.floats(1, 8))
@settings(max_examples=200)
def test_rates_nonnegative_on_unit_interval(rho, a, K, n):
    for f in (SF.constant(a), SF.linear(a), SF.linear_decay(a), SF.hill(a, K, n), SF.hill_decay(a, K, n)):
        assert f(rho) >= 0


def test_decay_families_clamp_only_when_asked():
    f = SF.linear_decay(0.5)
    assert f(1.1) < 0
    assert f.values(1.1, clamp=True) == 0.0


def test_negative_parameters_rejected():
    with pytest.raises(ValueError):
        SF.constant(-1.0)
    with pytest.raises(ValueError):
        SF.hill(1.0, 0.5, 0.5)


def test_validate_constant_pair():
    rep = validate_pair(FIGURE_PAIRS["fig1a"], 101)
    assert rep.valid
    assert rep.gamma1_nonincreasing and rep.gamma2_nondecreasing
    assert (rep.gamma1_zero, rep.gamma2_zero) == (0.5, 1.0)
    assert not rep.degenerate


def test_validate_degenerate_pair():
    rep = validate_pair(FIGURE_PAIRS["fig1b"], 101)
    assert rep.valid and rep.degenerate


def test_validate_rejects_vanishing_sum():
    with pytest.raises(InvalidPairError):
        validate_pair(SwitchingPair(SF.linear_decay(0.5), SF.linear(0.0)), 11)


def test_validate_warns_on_non_monotone():
    pair = SwitchingPair(SF.linear(1.0), SF.constant(1.0))
    with pytest.warns(UserWarning, match="Gamma1 is not non-increasing"):
        rep = validate_pair(pair, 11)
    assert rep.valid and not rep.gamma1_nonincreasing


@pytest.mark.parametrize("name", sorted(FIGURE_PAIRS))
def test_figure_pairs_validate(name):
    assert validate_pair(FIGURE_PAIRS[name], 1001).valid


def test_samples_precondition():
    with pytest.raises(ValueError):
        validate_pair(FIGURE_PAIRS["fig1a"], 1)


def test_record_round_trip():
    for f in ALL_FAMILIES + [SF.tabulated([0, 1], [1, 0])]:
        assert SF.from_record(f.to_record()) == f
    pair = FIGURE_PAIRS["fig1d"].with_epsilon(0.1)
    assert SwitchingPair.from_record(pair.to_record()) == pair


def test_record_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown key"):
        SF.from_record({"family": "hill", "b": 1.5, "K": 0.5, "n": 2, "m": 3})
    with pytest.raises(ConfigError, match="missing"):
        SF.from_record({"family": "hill", "b": 1.5})
    with pytest.raises(ConfigError):
        SF.from_record({"family": "cubic"})


def test_pair_is_immutable():
    pair = FIGURE_PAIRS["fig1a"]
    with pytest.raises(AttributeError):
        pair.epsilon = 2.0
