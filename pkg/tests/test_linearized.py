import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nopo.errors import DomainError, ParameterError, ThresholdProximityError
from nopo.linearized import (build_above, build_below, closed_form_above, closed_form_below,
                             covariance_above, covariance_below, moments_above, moments_below,
                             propagator, two_time_above, two_time_below)
from nopo.params import SystemParams
from oracles import close_entrywise, lyapunov


def below(gamma=1.0, delta=2.0, chi=0.3, ratio=0.5, eps=None):
    p = SystemParams.symmetric(gamma=gamma, delta=delta, chi=chi)
    return p.with_epsilon(eps) if eps is not None else p.with_eps_ratio(ratio)


def above(gamma=1.0, delta=3.0, chi=0.5, ratio=1.5, lam=1.0):
    return SystemParams.symmetric(gamma=gamma, delta=delta, chi=chi, lam=lam).with_eps_ratio(ratio)


def test_ordinary_nopo_blocks():
    dd = build_below(below(delta=0, chi=0, eps=0.5))
    assert np.allclose(dd.F[:2, :2], np.eye(2))
    assert np.allclose(dd.F[:2, 2:], -0.5 * np.array([[0, 1], [1, 0]]))
    assert np.allclose(dd.D[:2, :2], 0.5 * np.array([[0, 1], [1, 0]]))


def test_stable_below_threshold_example():
    dd = build_below(below(eps=1.0))
    assert np.all(np.linalg.eigvals(dd.F).real > 0)


@settings(max_examples=100, deadline=None)
@given(gamma=st.floats(0.1, 3), delta=st.floats(-5, 5), chi=st.floats(0, 3), ratio=st.one_of(st.just(0.0), st.floats(1e-6, 0.99)))
def test_commutation_identity_and_lyapunov(gamma, delta, chi, ratio):
    dd = build_below(below(gamma, delta, chi, ratio))
    assert np.array_equal(dd.D @ dd.F.T, dd.F @ dd.D)
    c = covariance_below(dd).equal_time["full"]
    assert close_entrywise(c, lyapunov(dd.F, dd.D), dd.F, dd.D)


def test_nopo_photon_number_example():
    cov = covariance_below(build_below(below(delta=0, chi=0, eps=0.5)))
    assert cov.n == pytest.approx(1 / 6)
    assert cov.closed_form["n"] == pytest.approx(1 / 6)


def test_no_pump_means_vacuum():
    cov = covariance_below(build_below(below(eps=0.0)))
    assert np.allclose(cov.equal_time["full"], 0) and cov.n == 0


def test_closed_forms_below():
    cov = covariance_below(build_below(below(ratio=0.8)))
    for key in ("aa", "ab"):
        assert np.allclose(cov.equal_time[key], cov.closed_form[key], rtol=1e-10, atol=1e-14)
    assert np.allclose(cov.equal_time["ab"].imag, 0, atol=1e-14)
    assert np.allclose(cov.equal_time["ab"], cov.equal_time["ab"].T)


def test_alpha_alpha_prefactor():
    # <da1 da2> = eps (gamma S^2 - i D (S^2 - 2 chi^2)) / (2 (S^4 - 4 D^2 chi^2)); a doubled
    # prefactor is an easy slip, so pin the value against the Lyapunov oracle directly
    p = below(ratio=0.7)
    g, d, chi, eps = p.gamma, p.delta, p.chi, p.epsilon
    s2 = g * g + chi * chi + d * d - eps * eps
    expected = eps * (g * s2 - 1j * d * (s2 - 2 * chi ** 2)) / (2 * (s2 ** 2 - 4 * d * d * chi * chi))
    dd = build_below(p)
    assert lyapunov(dd.F, dd.D)[0, 1] == pytest.approx(expected, rel=1e-12)
    assert covariance_below(dd).equal_time["aa"][0, 1] == pytest.approx(expected, rel=1e-12)


def test_build_below_preconditions():
    with pytest.raises(DomainError):
        build_below(below(ratio=1.2))
    with pytest.raises(ParameterError):
        build_below(SystemParams(gamma1=1, gamma2=2))


def test_threshold_proximity_guard():
    p = below(ratio=1 - 1e-13)
    with pytest.raises(ThresholdProximityError):
        covariance_below(build_below(p))
    cov = covariance_below(build_below(below(ratio=0.99)))
    assert not cov.reliable


def test_two_time_below():
    dd = build_below(below(ratio=0.6))
    c = covariance_below(dd).equal_time["full"]
    assert np.allclose(two_time_below(dd, 0.0), c, atol=1e-15)
    rate = np.min(np.linalg.eigvals(dd.F).real)
    late = two_time_below(dd, 30.0)
    assert np.max(np.abs(late)) < 10 * math.exp(-rate * 30.0) * np.max(np.abs(c))
    with pytest.raises(ParameterError):
        two_time_below(dd, -1.0)


def test_propagator_fallback_for_defective_matrix():
    f = np.array([[1.0, 1.0], [0.0, 1.0]])
    tau = 0.7
    expected = math.exp(-tau) * np.array([[1.0, -tau], [0.0, 1.0]])
    assert np.allclose(propagator(f, tau), expected)


def test_above_matrices_example():
    p = above()
    dp, dm = build_above(p)
    s = dp.state
    assert np.allclose(dp.F, [[2 * p.lam * s.n0, 4 * s.n0 * p.epsilon * math.sin(s.phase_sum)],
                              [0, 2 * (p.gamma + p.lam * s.n0)]])
    assert dm.F[0, 0] == pytest.approx(2 * p.gamma) and dm.F[1, 0] == pytest.approx(p.delta / s.n0)
    assert np.allclose(dm.D, -dp.D)


@settings(max_examples=100, deadline=None)
@given(gamma=st.floats(0.1, 3), delta=st.floats(0.2, 5), sign=st.sampled_from([-1, 1]),
       chi=st.floats(0.05, 3), ratio=st.floats(1.05, 8), lam=st.floats(1e-3, 2))
def test_pipeline_matches_closed_forms_above(gamma, delta, sign, chi, ratio, lam):
    dds = build_above(above(gamma, sign * delta, chi, ratio, lam))
    cov = covariance_above(dds)
    for key, dd in zip(("plus", "minus"), dds):
        assert close_entrywise(cov.equal_time[key], cov.closed_form[key], dd.F, dd.D)
        assert close_entrywise(cov.equal_time[key], lyapunov(dd.F, dd.D), dd.F, dd.D)


def test_minus_block_phase_variance_example():
    p = SystemParams.symmetric(gamma=1, delta=3, chi=0.5)
    assert closed_form_above(p, 2.0)["minus"][1, 1] == pytest.approx(8.5 / 12)


def test_plus_block_is_symmetric_with_full_offdiagonal():
    p = above()
    cov = covariance_above(build_above(p))
    n0, lam = cov.n, p.lam
    off = -2 * lam * n0 * (p.chi - abs(p.delta)) / (4 * lam * n0 * (p.gamma + lam * n0))
    assert cov.equal_time["plus"][0, 1] == pytest.approx(off)
    assert cov.equal_time["plus"][0, 1] == pytest.approx(cov.equal_time["plus"][1, 0])


def test_sign_flip_of_detuning_flips_marked_entries_only():
    a = closed_form_above(above(delta=3.0), 2.0)
    b = closed_form_above(above(delta=-3.0), 2.0)
    for key in ("plus", "minus"):
        assert a[key][0, 0] == pytest.approx(b[key][0, 0])
        assert a[key][1, 1] == pytest.approx(b[key][1, 1])
        assert a[key][0, 1] == pytest.approx(-b[key][0, 1])


def test_individual_mode_variances_equal():
    p = above(ratio=2.0)
    dds = build_above(p)
    cov = covariance_above(dds)
    y = np.zeros((4, 4))
    y[:2, :2] = cov.equal_time["plus"]
    y[2:, 2:] = cov.equal_time["minus"]
    # (dn1, dn2, dphi1, dphi2) from (dn+, dphi+, dn-, dphi-)
    m = 0.5 * np.array([[1, 0, -1, 0], [1, 0, 1, 0], [0, 1, 0, -1], [0, 1, 0, 1]])
    z = m @ y @ m.T
    assert z[0, 0] == pytest.approx(z[1, 1])
    assert z[2, 2] == pytest.approx(z[3, 3])


def test_two_time_above():
    dds = build_above(above())
    cov = covariance_above(dds)
    plus0, minus0 = two_time_above(dds, 0.0)
    assert np.allclose(plus0, cov.equal_time["plus"]) and np.allclose(minus0, cov.equal_time["minus"])
    plus, minus = two_time_above(dds, 40.0)
    assert np.max(np.abs(minus)) < 1e-10 * np.max(np.abs(cov.equal_time["minus"])) + 1e-12


def test_build_above_preconditions():
    with pytest.raises(DomainError):
        build_above(above(ratio=0.9))
    with pytest.raises(ThresholdProximityError):
        build_above(above(ratio=1.0 + 1e-15))


def test_moment_mappings_have_expected_structure():
    m = moments_below(covariance_below(build_below(below(ratio=0.5))))
    assert m["n"] > 0 and abs(m["a1a2"]) > 0
    p = above(ratio=2.0)
    dds = build_above(p)
    ma = moments_above(covariance_above(dds), dds[0].state)
    assert set(ma) == {"n", "a1a2", "a1sq", "a1dag_a2"}
