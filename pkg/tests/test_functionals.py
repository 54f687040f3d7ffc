import math
from types import SimpleNamespace

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from nsp_wavelab.evolve import CompositeWave, GridState, make_grid, solve_potential
from nsp_wavelab.functionals import (effective_velocity, elliptic_residual, energy_report,
                                     equivalence_measure, eta_integral, eta_pointwise, good_terms,
                                     norms, perturbation, pressure_gap_derivative_chain,
                                     relative_pressure, relative_Q)


def test_Q_taylor_coefficients_symbolic():
    v, vb = sp.symbols("v vbar", positive=True)
    Q = -2 * sp.log(v / vb) + 2 * (v - vb) / vb
    x = sp.symbols("x")
    ser = sp.series(Q.subs(v, vb + x), x, 0, 4).removeO()
    assert sp.simplify(ser.coeff(x, 2) - 1 / vb**2) == 0
    assert sp.simplify(ser.coeff(x, 3) + sp.Rational(2, 3) / vb**3) == 0
    assert ser.coeff(x, 0) == 0 and ser.coeff(x, 1) == 0


def test_relative_Q_values():
    assert relative_Q(1.3, 1.3) == 0.0
    assert float(relative_Q(2.0, 1.0)) == pytest.approx(0.613706, abs=1e-6)
    for eps in (1e-2, 1e-3):
        assert float(relative_Q(1 + eps, 1.0)) / eps**2 == pytest.approx(1.0, abs=2 * eps)


def test_relative_pressure_values():
    assert relative_pressure(0.7, 0.7) == 0.0
    assert float(relative_pressure(2.0, 1.0)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        relative_pressure(-1.0, 1.0)
    with pytest.raises(ValueError):
        relative_Q(1.0, 0.0)


def test_relative_quantities_nonnegative():
    rng = np.random.default_rng(0)
    v = rng.uniform(0.05, 5.0, 10_000)
    vb = rng.uniform(0.05, 5.0, 10_000)
    assert np.all(relative_pressure(v, vb) >= 0)
    assert np.all(relative_Q(v, vb) >= 0)


@settings(max_examples=200, deadline=None)
@given(v=st.floats(0.01, 100), vb=st.floats(0.01, 100))
def test_relative_Q_convexity_property(v, vb):
    assert relative_Q(v, vb) >= -1e-12 * (1 + abs(math.log(v / vb)))


def test_effective_velocity():
    xi = np.linspace(-5, 5, 101)
    u = np.sin(xi)
    np.testing.assert_array_equal(effective_velocity(np.full_like(xi, 2.0), u, 0.1), u)
    v = 1 + 0.1 * np.exp(-xi**2)
    u2 = np.cos(xi)
    np.testing.assert_allclose(effective_velocity(v, u + u2, 0.1) - effective_velocity(v, u, 0.1), u2,
                               atol=1e-15)


def test_effective_velocity_matches_profile(profile):
    ev = profile.eval(profile.xi)
    h = effective_velocity(ev["v"], ev["u"], profile.dxi)
    assert np.max(np.abs(h - ev["h"])) < 1e-5


def test_eta_pointwise_cases():
    v = np.array([1.1, 1.2])
    z = np.zeros(2)
    assert np.all(eta_pointwise((v, z + 0.3, -np.log(v)), (v, z + 0.3, -np.log(v)), z, z) == 0)
    eta = eta_pointwise((v, z + 0.5, -np.log(v)), (v, z + 0.2, -np.log(v)), z, z)
    np.testing.assert_allclose(eta, 0.5 * 0.3**2)


@pytest.fixture(scope="module")
def setting(fan, profile):
    wave = CompositeWave.from_fan(fan, profile)
    xi = make_grid(100.0, 0.05)
    comp = wave.eval(0.0, 0.0, xi)
    return wave, xi, comp


def state_with(setting, dv, du):
    wave, xi, comp = setting
    st_ = GridState(0.0, 0.0, xi, comp["v"] + dv, comp["u"] + du, -np.log(comp["v"] + dv))
    st_.phi = solve_potential(st_, {"phi": comp["phi"][[0, -1]]})
    return st_


def test_zero_perturbation_all_zero(shock_fan, shock_profile_only):
    wave = CompositeWave.from_fan(shock_fan, shock_profile_only)
    xi = make_grid(100.0, 0.05)
    comp = wave.eval(0.0, 0.0, xi)
    st_ = GridState(0.0, 0.0, xi, comp["v"].copy(), comp["u"].copy(), comp["phi"].copy())
    rep = energy_report(st_, comp, shock_fan.sigma, 0.0)
    for key in ("Linf_v", "Linf_u", "L2_v", "H2_u", "G2", "G3", "GS", "GR", "D"):
        assert getattr(rep, key) == 0.0
    # h~ reduces to the grid error of (ln v)_xi against the analytic profile derivative
    assert rep.eta_weighted < 1e-9 and rep.G1 < 1e-9


def test_composite_effective_velocity_gap(setting, fan):
    # hbar carries u^R but not -(ln v^R)_xi, so with (v, u, phi) = composite
    # h~ = (ln vS)_xi - (ln vbar)_xi, which is O(vR_xi)
    wave, xi, comp = setting
    st_ = GridState(0.0, 0.0, xi, comp["v"].copy(), comp["u"].copy(), comp["phi"].copy())
    pert = perturbation(st_, comp)
    gap = comp["vS_xi"] / comp["vS"] - comp["v_xi"] / comp["v"]
    assert np.max(np.abs(pert["h"] - gap)) < 1e-4  # O(dxi^2) differencing error
    assert np.max(np.abs(gap)) > 1e-2
    eta = eta_integral(st_, comp, weighted=False, pert=pert)
    assert eta == pytest.approx(0.5 * np.sum(pert["h"] ** 2) * st_.dxi, rel=1e-6)


def test_good_terms_nonnegative(setting, fan):
    wave, xi, comp = setting
    bump = np.exp(-(xi - 3) ** 2 / 8)
    st_ = state_with(setting, 0.01 * bump, -0.005 * bump)
    g = good_terms(st_, comp, fan.sigma)
    assert all(val >= 0 for val in g.values())
    assert g["GS"] > 0 and g["G1"] > 0 and g["D"] > 0


def test_gr_vanishes_without_rarefaction(shock_fan, shock_profile_only):
    wave = CompositeWave.from_fan(shock_fan, shock_profile_only)
    xi = make_grid(60.0, 0.1)
    comp = wave.eval(0.0, 0.0, xi)
    st_ = GridState(0.0, 0.0, xi, comp["v"] + 0.01 * np.exp(-xi**2), comp["u"], comp["phi"])
    assert good_terms(st_, comp, shock_fan.sigma)["GR"] == 0.0


def test_pressure_gap_two_stencils(fan, profile):
    wave = CompositeWave.from_fan(fan, profile)
    errs = []
    for d in (0.1, 0.05):
        xi = make_grid(60.0, d)
        comp = wave.eval(2.0, 0.0, xi)
        v = comp["v"] + 0.01 * np.exp(-xi**2 / 4)
        st_ = SimpleNamespace(v=v, dxi=d)
        direct = np.gradient(2 / v - 2 / comp["v"], d)
        chain = pressure_gap_derivative_chain(st_, comp)
        errs.append(np.max(np.abs(direct - chain)[2:-2]))
    assert errs[1] < errs[0] / 3


def test_gaussian_l2_norm(setting):
    wave, xi, comp = setting
    A, w = 0.01, 2.0
    st_ = GridState(0.0, 0.0, xi, comp["v"] + A * np.exp(-xi**2 / (2 * w * w)), comp["u"], comp["phi"])
    n = norms(st_, comp)
    assert n["L2_v"] == pytest.approx(A * math.sqrt(w * math.sqrt(math.pi)), rel=1e-8)
    assert n["L2_u"] == 0.0


def test_elliptic_residual(setting):
    wave, xi, comp = setting
    st_ = state_with(setting, 0.01 * np.exp(-xi**2), 0.0)
    r = elliptic_residual(st_, comp)
    assert r["state"] < 1e-12
    assert r["shock"] < 1e-6
    noisy = GridState(0.0, 0.0, xi, st_.v, st_.u,
                      st_.phi + 1e-3 * np.random.default_rng(1).standard_normal(len(xi)))
    assert elliptic_residual(noisy, comp)["max"] > 1e-4


def test_eta_equivalence_small_sample(setting):
    wave, xi, comp = setting
    rng = np.random.default_rng(5)
    ratios = []
    for _ in range(5):
        c1, c2 = rng.uniform(-10, 10, 2)
        w1, w2 = rng.uniform(1, 4, 2)
        a1, a2 = rng.uniform(-1e-3, 1e-3, 2)
        st_ = state_with(setting, a1 * np.exp(-(xi - c1) ** 2 / (2 * w1**2)),
                         a2 * np.exp(-(xi - c2) ** 2 / (2 * w2**2)))
        pert = perturbation(st_, comp)
        ratios.append(eta_integral(st_, comp, weighted=False, pert=pert)
                      / equivalence_measure(pert, st_.dxi))
    assert min(ratios) > 0.1 and max(ratios) < 10
