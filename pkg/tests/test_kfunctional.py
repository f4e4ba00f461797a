import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammaspaces import kfunctional as kf
from gammaspaces.errors import EvaluationError, ParameterError
from gammaspaces.harness import T_GRID
from gammaspaces.rearrangement import PowerLog, Psi, Step, constant, indicator, nu_rearrangement, zero
from gammaspaces.spaces import GrandLp, Lp, SmallLp, WeakLp

T = np.asarray(T_GRID)

# scripts/oracles.py
K_CLASSICAL_SMALL_CONST = 0.4702330509236897  # f = 1, p = 3/2, t = 1/2
K_GRAND_CLASSICAL_CONST = 0.29999390609178733  # f = 1, p = 2, t = 0.3


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_weak_classical_closed_is_one_for_borderline_power(grid, p):
    k = kf.k_closed(PowerLog(1.0 / p), kf.couple("weak-classical", p), T, grid)
    assert np.allclose(k, 1.0, rtol=1e-12)


def test_weak_classical_closed_for_power_and_indicator(grid):
    # psi = s^{1/4}: psi_{*,nu}(x) = e^{-x/4}, K = t (2 (1 - e^{-t^{-2}/2}))^{1/2}
    k = kf.k_closed(PowerLog(0.25), kf.couple("weak-classical", 2.0), T, grid)
    assert np.allclose(k, T * np.sqrt(2 * -np.expm1(-T ** -2 / 2)), rtol=1e-11)
    # chi_(0,a]: K = t (a (1 - e^{-t^{-p}}))^{1/p}
    a, p = 0.125, 3.0
    k = kf.k_closed(indicator(a), kf.couple("weak-classical", p), T, grid)
    assert np.allclose(k, T * (a * -np.expm1(-T ** -p)) ** (1 / p), rtol=1e-11)


def test_closed_forms_against_quadrature(grid):
    one = constant(1.0)
    got = kf.k_closed(one, kf.couple("classical-small", 1.5), 0.5, grid)
    assert got == pytest.approx(K_CLASSICAL_SMALL_CONST, rel=1e-10)
    got = kf.k_closed(one, kf.couple("grand-classical", 2.0), 0.3, grid)
    assert got == pytest.approx(K_GRAND_CLASSICAL_CONST, rel=1e-10)


def test_grand_grand_closed_for_power(grid):
    # f_*^2 = 1/s, T(u) = u - 1, U = 4: sup_{u>4} (u-4)^{1/2}/u = 1/4, t sup_{u<4} ((u-1)/u)^{1/2}
    got = kf.k_closed(PowerLog(0.5), kf.couple("grand-grand", 2.0, 2.0, 1.0), 0.5, grid)
    assert got == pytest.approx(0.25 + 0.5 * math.sqrt(0.75), rel=1e-9)


def test_search_is_close_to_closed_for_weak_classical(grid):
    cpl = kf.couple("weak-classical", 2.0)
    f = Step((0.01, 0.3), (5.0, 1.0))
    ks = kf.k_search(f, cpl, T, grid=grid)
    kc = kf.k_closed(f, cpl, T, grid)
    r = ks / kc
    assert np.all(r > 0.99) and np.all(r < 1.1)


@pytest.mark.parametrize("tag", ["classical-small", "grand-classical", "grand-grand",
                                 "weak-classical", "weak-small"])
def test_zero_function_has_zero_k(grid, tag):
    cpl = kf.couple(tag, 2.0, 2.0, 1.0) if tag == "grand-grand" else kf.couple(tag, 2.0)
    assert np.all(kf.k_search(zero(), cpl, [0.1, 0.5], grid=grid) == 0.0)


def test_greedy_matches_hardy_littlewood(grid):
    f, p = indicator(2.0 ** -3), 2.0
    nu = nu_rearrangement(Psi(f, p), 100.0, grid)
    for x in (1.0, 10.0, 100.0):
        exact = float(nu.power_integral(x, p)[0])
        assert kf.greedy_set_supremum(f, p, x, grid) == pytest.approx(exact, rel=1e-3)
    with pytest.raises(ParameterError):
        kf.greedy_set_supremum(f, p, 0.0, grid)


def test_lower_bound_weak_small(grid):
    rho, low = kf.k_lower_weak_small(indicator(0.25), 2.0, 0.1, grid)
    assert rho == pytest.approx((1 - math.log(0.1)) ** -0.5)
    assert low == pytest.approx(math.sqrt(0.1), rel=1e-9)
    _, low = kf.k_lower_weak_small(indicator(0.25), 2.0, 0.5, grid)
    assert low == pytest.approx(0.5, rel=1e-9)


def test_couple_validation():
    with pytest.raises(ParameterError):
        kf.CoupleSpec(Lp(2.0), SmallLp(3.0, 1.0), "classical-small")
    with pytest.raises(ParameterError):
        kf.couple("grand-grand", 2.0, 1.0, 2.0)
    with pytest.raises(ParameterError):
        kf.couple("nonsense", 2.0)
    cpl = kf.couple("grand-grand", 2.0, 2.0, 1.0)
    assert kf.CoupleSpec.from_dict(cpl.to_dict()) == cpl
    generic = kf.CoupleSpec(WeakLp(2.0), Lp(2.0), "generic")
    assert generic.tag == "generic"


def test_t_and_level_validation(grid):
    cpl = kf.couple("grand-classical", 2.0)
    with pytest.raises(ParameterError):
        kf.k_search(constant(1.0), cpl, [0.0, 0.5], grid=grid)
    with pytest.raises(ParameterError):
        kf.k_search(constant(1.0), cpl, [1.0], grid=grid)
    with pytest.raises(ParameterError):
        kf.k_search(constant(1.0), cpl, [0.5], levels=4, grid=grid)
    with pytest.raises(ParameterError):
        kf.k_closed(constant(1.0), kf.couple("weak-small", 2.0), [0.5], grid)


def test_weak_couple_needs_weak_membership(grid):
    with pytest.raises(EvaluationError):
        kf.k_closed(PowerLog(0.7), kf.couple("weak-classical", 2.0), [0.5], grid)


def test_k_curve_object(grid):
    curve = kf.k_curve(indicator(0.25), kf.couple("weak-classical", 2.0), T[::10], "closed-form", grid)
    assert curve.method == "closed-form" and len(curve.values) == len(curve.t_grid)
    assert curve.shape_violations() == []
    bad = kf.KCurve((0.1, 0.2), (1.0, 0.5), "search", curve.couple)
    assert bad.shape_violations()


couples = st.sampled_from([kf.couple("classical-small", 2.0), kf.couple("grand-classical", 2.0),
                           kf.couple("grand-grand", 2.0, 2.0, 1.0), kf.couple("weak-classical", 2.0),
                           kf.couple("weak-small", 2.0)])
members = st.tuples(st.floats(0.0, 0.45), st.floats(-1.0, 1.5)).filter(
    lambda ab: not (ab[0] == 0.0 and ab[1] > 0.0)).map(lambda ab: PowerLog(*ab))


@settings(max_examples=10)
@given(members, couples)
def test_search_curve_shape(f, cpl):
    from gammaspaces.grids import make_log_grid
    curve = kf.k_curve(f, cpl, T[::4], "search", make_log_grid(cells=200))
    assert curve.shape_violations() == []
    assert all(v > 0 and math.isfinite(v) for v in curve.values)
