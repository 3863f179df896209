import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nopo.errors import ParameterError
from nopo.unitary import (ABOVE, BELOW, CRITICAL, period, regime, t_min, unitary_curve, v_min, v_of_t)
from oracles import heisenberg_variance


@settings(max_examples=60, deadline=None)
@given(eps=st.floats(0, 3), chi=st.floats(0, 3), t=st.floats(0, 3), sth=st.floats(-4, 4))
def test_closed_form_matches_heisenberg_evolution(eps, chi, t, sth):
    expected = heisenberg_variance(eps, chi, t, sth)
    # the propagator itself carries rounding of order |U|^2 ~ exp(2 eta t)
    eta = math.sqrt(max(eps ** 2 - chi ** 2, 0.0))
    floor = 1e-13 * (1 + eps * t) ** 2 * math.exp(2 * eta * t)
    assert v_of_t(eps, chi, sth, t) == pytest.approx(expected, rel=1e-8, abs=floor)


def test_initial_value_is_one():
    for eps, chi in ((0.2, 1), (1, 1), (3, 1), (0, 0), (1, 0)):
        assert v_of_t(eps, chi, 0.3, 0.0) == 1.0


def test_nopo_limit_decays_exponentially():
    t = np.linspace(0, 30, 61)
    assert np.allclose(v_of_t(1.3, 0.0, 0.0, t), np.exp(-2 * 1.3 * t), rtol=1e-10, atol=0)
    # general angle: V = cosh(2 eps t) - sinh(2 eps t) cos(sigma_theta)
    t = np.linspace(0, 3, 31)
    expected = np.cosh(2 * 1.3 * t) - np.sinh(2 * 1.3 * t) * math.cos(0.4)
    assert np.allclose(v_of_t(1.3, 0.0, 0.4, t), expected, rtol=1e-12)


@pytest.mark.parametrize("ratio", [1.01, 1.5, 3.0])
@pytest.mark.parametrize("sth", [0.0, 0.3, math.pi])
def test_large_time_form_is_continuous(ratio, sth):
    eta = math.sqrt(ratio ** 2 - 1)
    t = np.array([1 - 1e-9, 1 + 1e-9]) / eta
    v = v_of_t(ratio, 1.0, sth, t)
    assert v[0] == pytest.approx(v[1], rel=1e-7)


def _branch(eps, chi, t):
    mu = math.sqrt(abs(chi ** 2 - eps ** 2))
    if eps < chi:
        return 1 + 2 * (eps / mu) ** 2 * np.sin(mu * t) ** 2 - eps / mu * np.sin(2 * mu * t)
    return 1 + 2 * (eps / mu) ** 2 * np.sinh(mu * t) ** 2 - eps / mu * np.sinh(2 * mu * t)


@pytest.mark.parametrize("sign", [-1, 1])
def test_branches_converge_to_critical_limit(sign):
    # the gap is O(delta (eps t)^3), so agreement to 1e-8 at delta = 1e-6 holds
    # only for eps t <~ 0.15; on the full window it shrinks linearly in delta
    chi = 1.0
    t = np.linspace(0, 5, 51)
    limit = 1 + 2 * t ** 2 - 2 * t
    gaps = []
    for delta in (1e-3, 1e-4, 1e-5):
        eps = chi * (1 + sign * delta)
        lim = 1 + 2 * eps ** 2 * t ** 2 - 2 * eps * t
        gaps.append(np.max(np.abs(_branch(eps, chi, t) - lim)))
    assert gaps[1] / gaps[0] == pytest.approx(0.1, rel=0.05)
    assert gaps[2] / gaps[1] == pytest.approx(0.1, rel=0.05)
    eps = chi * (1 + sign * 1e-6)
    short = np.linspace(0, 0.15, 31)
    lim = 1 + 2 * eps ** 2 * short ** 2 - 2 * eps * short
    assert np.max(np.abs(_branch(eps, chi, short) - lim)) < 1e-8
    assert np.allclose(v_of_t(eps, chi, 0.0, t), limit, rtol=1e-4, atol=1e-4)


def test_continuity_across_critical_point():
    t = np.linspace(0, 5, 101)
    gaps = [np.max(np.abs(_branch(1 - d, 1.0, t) - _branch(1 + d, 1.0, t))) for d in (1e-2, 1e-3, 1e-4)]
    assert gaps[1] / gaps[0] == pytest.approx(0.1, rel=0.05)
    assert gaps[2] / gaps[1] == pytest.approx(0.1, rel=0.05)


def test_regimes():
    assert regime(0.5, 1) == BELOW and regime(2, 1) == ABOVE and regime(1 + 1e-8, 1) == CRITICAL


def test_minima_satisfy_transcendental_conditions():
    for ratio in (0.2, 0.4, 0.7):
        mu = math.sqrt(1 - ratio ** 2)
        for t in t_min(ratio, 1.0):
            assert 1 / math.tan(2 * mu * t) == pytest.approx(ratio / mu, abs=1e-10)
    for ratio in (1.1, 2.0, 3.0):
        eta = math.sqrt(ratio ** 2 - 1)
        (t,) = t_min(ratio, 1.0)
        assert 1 / math.tanh(2 * eta * t) == pytest.approx(ratio / eta, abs=1e-10)


def test_minimum_value_is_universal():
    for ratio in (0.1, 0.2, 0.4, 0.7, 0.95, 1.1, 2.0, 3.0, 7.0):
        for t in t_min(ratio, 1.0, count=4):
            assert v_of_t(ratio, 1.0, 0.0, t) == pytest.approx(ratio and 1 / (ratio + 1), abs=1e-10)


def test_minima_are_spaced_by_period_and_are_minima():
    ratio = 0.4
    ts = t_min(ratio, 1.0, count=4)
    assert np.allclose(np.diff(ts), period(ratio, 1.0))
    grid = np.linspace(0, ts[-1] + 0.5, 20001)
    v = v_of_t(ratio, 1.0, 0.0, grid)
    assert v.min() >= v_min(ratio, 1.0) - 1e-12


def test_periodicity():
    eps, chi = 0.3, 1.0
    t = np.linspace(0, 4, 40)
    assert np.allclose(v_of_t(eps, chi, 0.4, t + period(eps, chi)), v_of_t(eps, chi, 0.4, t))


def test_vmin_values():
    assert v_min(3, 1) == pytest.approx(0.25)
    assert v_min(1, 1) == 0.5
    assert v_min(1, 0) == 0.0
    assert v_min(0, 0) == 1.0
    grid = np.linspace(0, 2, 200001)
    assert v_of_t(3, 1, 0.0, grid).min() == pytest.approx(0.25, abs=1e-8)


def test_no_minimum_cases():
    assert t_min(0.0, 1.0) == []
    assert t_min(1.0, 0.0) == []


def test_exponential_growth_above():
    t = np.array([5.0, 6.0])
    v = v_of_t(2.0, 1.0, 0.0, t)
    eta = math.sqrt(3)
    assert v[1] / v[0] == pytest.approx(math.exp(2 * eta), rel=1e-3)


def test_curve_object_and_errors():
    c = unitary_curve(0.2, 1.0)
    assert c.V[0] == 1.0 and c.regime == BELOW and len(c.t_min) == 3 and "lossless" in c.note
    with pytest.raises(ParameterError):
        v_of_t(-1, 1, 0, 0.1)
    with pytest.raises(ParameterError):
        v_of_t(1, 1, 0, -0.1)
