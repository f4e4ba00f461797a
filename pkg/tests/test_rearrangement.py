import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gammaspaces.asymptotics import Growth
from gammaspaces.errors import EvaluationError, ParameterError
from gammaspaces.rearrangement import (Function01, PowerLog, Psi, SampledFunction, Step, Tabulated,
                                       constant, decreasing_rearrangement,
                                       distribution_function, indicator, nu_rearrangement,
                                       rearrange_on_grid, truncation_split, weak_lp_split, zero)

samples = st.lists(st.floats(0.0, 50.0, allow_nan=False), min_size=1, max_size=40)
exponents = st.tuples(st.floats(0.0, 0.45), st.floats(-1.0, 2.0)).filter(
    lambda ab: not (ab[0] == 0.0 and ab[1] > 0.0))


def _measure_above(step: Step, y: float) -> float:
    """|{f_* > y}| for a right-continuous nonincreasing step function."""
    m = 0.0
    for b, v in zip(step.breaks_s, step.values):
        if v > y:
            m = b
    return m


@given(samples)
def test_rearrangement_is_equimeasurable(vals):
    f = SampledFunction(tuple(vals))
    fs = decreasing_rearrangement(f)
    levels = sorted(set(vals)) + [v + 0.5 for v in vals] + [0.0, -0.0]
    for y in levels:
        assert _measure_above(fs, y) == pytest.approx(distribution_function(f, y), abs=1e-15)
    assert np.all(np.diff(fs.values) <= 0)


def test_rearrangement_examples():
    fs = decreasing_rearrangement(SampledFunction((1.0, 3.0, 2.0, 3.0)))
    assert fs.breaks_s == (0.5, 0.75, 1.0)
    assert fs.values == (3.0, 2.0, 1.0)
    assert np.allclose(fs(np.array([0.1, 0.5, 0.8, 1.0])), [3.0, 2.0, 1.0, 1.0], rtol=1e-15)
    with pytest.raises(ParameterError):
        SampledFunction(())
    with pytest.raises(ParameterError):
        distribution_function(SampledFunction((1.0,)), -1.0)


def test_step_is_right_continuous_and_closed_at_one():
    f = Step((0.25, 1.0), (2.0, 1.0))
    assert f(0.25) == 1.0 and f(0.2499) == 2.0 and f(1.0) == 1.0
    g = indicator(0.25)
    assert g(0.25) == 0.0 and g(0.1) == 1.0
    with pytest.raises(ParameterError):
        Step((0.5, 0.25), (1.0, 2.0))


def test_powerlog_values_and_flattening():
    f = PowerLog(0.5, 0.0)
    assert f(0.25) == pytest.approx(2.0, rel=1e-14)
    g = PowerLog(0.25, 0.5)  # increasing near s = 1 for u < b/a = 2
    s_m = math.exp(1.0 - 2.0)
    assert g(0.9) == pytest.approx(g(s_m), rel=1e-14)
    assert g(0.01) == pytest.approx(0.01 ** -0.25 * (1 - math.log(0.01)) ** -0.5, rel=1e-13)
    with pytest.raises(ParameterError):
        PowerLog(0.0, 1.0)
    with pytest.raises(ParameterError):
        PowerLog(0.5, 0.0, support=0.0)


def test_tabulated_is_log_linear():
    f = Tabulated((1.0, 3.0), (1.0, math.e ** 2))
    assert f(math.exp(1.0 - 2.0)) == pytest.approx(math.e, rel=1e-14)
    with pytest.raises(ParameterError):
        Tabulated((1.0, 2.0), (2.0, 1.0))


@given(exponents, st.floats(0.01, 20.0))
def test_truncation_split_sums_to_f(ab, level):
    f = PowerLog(*ab)
    g, h = truncation_split(f, level)
    s = np.geomspace(1e-12, 1.0, 41)
    assert np.allclose(g(s) + h(s), f(s), rtol=1e-12)
    assert np.all(h(s) <= level * (1 + 1e-15))


@given(exponents, st.floats(0.05, 5.0), st.sampled_from([1.5, 2.0, 3.0]))
def test_weak_split_sums_to_f(ab, cut, p):
    f = PowerLog(*ab)
    g0, g1 = weak_lp_split(f, p, cut)
    s = np.geomspace(1e-12, 1.0, 41)
    assert np.allclose(g0(s) + g1(s), f(s), rtol=1e-12)
    assert np.all(g0(s) <= cut * s ** (-1 / p) * (1 + 1e-12))
    assert np.all(g1(s) >= 0)


def test_splits_at_extreme_levels():
    f = PowerLog(0.3)
    assert truncation_split(f, 0.0)[1].is_zero
    assert weak_lp_split(f, 2.0, math.inf)[1].is_zero
    with pytest.raises(ParameterError):
        truncation_split(f, -1.0)


def test_rearrange_on_grid_of_increasing_function(grid):
    class Rising(Function01):
        """g(s) = s."""

        growth = Growth(1.0, 0.0)

        def log_u(self, u):
            return 1.0 - np.asarray(u, dtype=float)

    fs = rearrange_on_grid(Rising(), grid)
    s = np.array([0.1, 0.5, 0.9])
    # a step reading of node samples: accurate to the local node spacing in s
    assert np.allclose(fs(s), 1.0 - s, atol=5e-3)
    assert np.all(np.diff(fs(np.linspace(0.01, 0.99, 50))) <= 0)


def test_nu_rearrangement_exact_for_powers(grid):
    # psi = s^{1/2} on (0, 1/4]: psi_{*,nu}(x) = e^{-(log 4 + x)/2}
    nu = nu_rearrangement(Psi(indicator(0.25), 2.0), 50.0, grid)
    x = np.array([0.0, 0.3, 1.0, 7.0])
    assert np.allclose(nu(x), 0.5 * np.exp(-x / 2), rtol=1e-12)
    # int_0^x psi_{*,nu}^2 = (1 - e^{-x}) / 4
    assert np.allclose(nu.power_integral(x[1:], 2.0), (1 - np.exp(-x[1:])) / 4, rtol=1e-12)
    assert nu.distribution(0.5)[0] == pytest.approx(0.0, abs=1e-12)


def test_nu_rearrangement_of_callable_and_errors(grid):
    nu = nu_rearrangement(lambda s: np.ones_like(s), 10.0, grid)
    assert nu(3.0) == pytest.approx(1.0)
    with pytest.raises(EvaluationError):
        nu_rearrangement(Psi(PowerLog(0.75), 2.0), 10.0, grid)
    with pytest.raises(ParameterError):
        nu_rearrangement(Psi(indicator(0.5), 2.0), 0.0, grid)


def test_zero_function():
    z = zero()
    assert z.is_zero and z(0.5) == 0.0
