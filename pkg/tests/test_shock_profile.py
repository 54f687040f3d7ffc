import numpy as np
import pytest

from nsp_wavelab.shock_profile import (equilibrium, first_integral, fixed_point_modes, profile_eval,
                                       profile_jacobian, profile_rhs, shode_residual, solve_profile,
                                       verify_tail)
from nsp_wavelab.thermo import solve_riemann

from conftest import SIGMA, shock_fan_of_amplitude


def test_equilibria_are_fixed_points():
    for v in (1.1, 1.2, 0.7):
        assert np.max(np.abs(profile_rhs(equilibrium(v), SIGMA))) == 0.0


def test_jacobian_matches_finite_differences():
    y = np.array([1.13, 0.02, -0.1, 0.05])
    J = profile_jacobian(y, SIGMA)
    h = 1e-6
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        col = (profile_rhs(y + e, SIGMA) - profile_rhs(y - e, SIGMA)) / (2 * h)
        np.testing.assert_allclose(J[:, k], col, atol=1e-8)


def test_first_integral_conserved_along_flow():
    y = np.array([1.13, 0.02, -0.1, 0.05])
    f = profile_rhs(y, SIGMA)
    h = 1e-6
    dI = (first_integral(y + h * f, SIGMA) - first_integral(y - h * f, SIGMA)) / (2 * h)
    assert abs(dI) < 1e-8


def test_reduction_matches_unreduced_equations():
    # rebuild the unreduced momentum and Poisson balances from the reduced
    # state by the chain rule, using u = u_m - sigma (v - v_m)
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.uniform(0.8, 1.5)
        y = np.array([v, rng.normal(0, 0.1), rng.normal(-np.log(v), 0.05), rng.normal(0, 0.1)])
        dv, dq, dphi, dz = profile_rhs(y, SIGMA)
        q, z = y[1], y[3]
        vpp = dv * q + v * dq
        up, upp = -SIGMA * dv, -SIGMA * vpp
        visc = (upp * v - up * dv) / v**2
        momentum = -SIGMA * up - dv / v**2 - visc + dphi / v
        assert abs(momentum) < 1e-13
        phipp = dv * z + v * dz
        poisson = -(phipp * v - dphi * dv) / v**2 - 1.0 + v * np.exp(y[2])
        assert abs(poisson) < 1e-13


def test_fixed_point_spectrum(fan):
    m = fixed_point_modes(fan.v_mid, fan.sigma)
    assert m.values[m.slow] == pytest.approx(0.1357, abs=2e-4)
    assert m.values[m.fast_stable] < -1.0
    assert abs(m.values[m.neutral]) < 1e-12


def test_profile_basic_properties(profile, fan):
    v = profile.state[0]
    ev = profile.eval(profile.xi)
    # strict at the level of derivatives; sample differences underflow in the far tails
    assert np.all(ev["vp"] > 0) and np.all(ev["up"] < 0) and np.all(ev["phip"] < 0)
    assert np.all(np.diff(v) >= 0) and np.all(np.diff(ev["u"]) <= 0)
    assert abs(v[0] - fan.v_mid) < 1e-8 and abs(v[-1] - fan.v_plus) < 1e-8
    assert abs(profile.eval(np.array([0.0]))["v"][0] - profile.anchor) < 1e-10
    np.testing.assert_allclose(ev["up"], -fan.sigma * ev["vp"], atol=1e-15)
    # phi'/u' stays in a positive band
    ratio = ev["phip"] / ev["up"]
    core = np.abs(profile.xi) < 40
    assert np.all(ratio[core] > 0)


def test_second_jump_consistency(profile, fan):
    ev = profile.eval(np.array([profile.L]))
    assert abs(ev["u"][0] - fan.u_mid + fan.sigma * (ev["v"][0] - fan.v_mid)) < 1e-8


def test_shode_residual_small(profile):
    res = shode_residual(profile)
    assert max(res.values()) < 1e-7


def test_far_field_extension(profile, fan):
    ev = profile_eval(profile, np.array([-10 * profile.L, 10 * profile.L]))
    assert ev["v"][0] == fan.v_mid and ev["v"][1] == fan.v_plus
    assert ev["u"][0] == pytest.approx(fan.u_mid, abs=1e-15)
    assert ev["vp"][0] == 0.0 and ev["phip"][1] == 0.0


def test_interpolated_derivative_consistent(profile):
    x = np.linspace(-5, 5, 201) + 0.013
    errs = []
    for h in (1e-2, 5e-3):
        vp = (profile.eval(x + h)["v"] - profile.eval(x - h)["v"]) / (2 * h)
        errs.append(np.max(np.abs(vp - profile.eval(x)["vp"])))
    assert errs[1] < 1e-6


def test_effective_velocity_stored(profile):
    ev = profile.eval(profile.xi)
    np.testing.assert_allclose(ev["h"], ev["u"] - ev["vp"] / ev["v"], atol=1e-15)


def test_uniqueness_up_to_shift(fan, profile):
    x = np.linspace(-100, 100, 4001)
    for r in (0.5, 2.0):
        other = solve_profile(fan, launch_offset=r * profile.launch_offset)
        assert np.max(np.abs(other.eval(x)["v"] - profile.eval(x)["v"])) < 1e-6


def test_tail_report(profile):
    rep = verify_tail(profile)
    assert rep.exponential and rep.rates_agree


def test_tail_rate_scales_with_amplitude():
    rates = {}
    for dS in (0.1, 0.2):
        rep = verify_tail(solve_profile(shock_fan_of_amplitude(dS)))
        rates[dS] = rep.rate_left
    assert 1.5 <= rates[0.2] / rates[0.1] <= 2.5


def test_zero_amplitude_profile():
    fan = solve_riemann(1.0, 0.0, 1.2, np.sqrt(2) * np.log(1.2))
    prof = solve_profile(fan)
    assert prof.trivial
    ev = prof.eval(np.array([0.0, 3.0]))
    np.testing.assert_array_equal(ev["v"], fan.v_mid)
