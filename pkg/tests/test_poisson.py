import numpy as np
import pytest

from nsp_wavelab.poisson import (PoissonNonconvergence, PoissonProblem, ddx, electric_force,
                                 flux_divergence, manufactured_study, poisson_residual, solve_phi)


def grid(n=401, L=10.0):
    return np.linspace(-L, L, n)


def test_quasineutral_equilibrium_is_exact():
    xi = grid()
    phi, stats = solve_phi(PoissonProblem(xi, np.ones_like(xi), 0.0, 0.0))
    assert np.max(np.abs(phi)) < 1e-14
    assert stats.iterations == 0


def test_problem_validation():
    xi = grid()
    with pytest.raises(ValueError):
        PoissonProblem(xi, np.zeros_like(xi), 0.0, 0.0)
    with pytest.raises(ValueError):
        PoissonProblem(xi**3, np.ones_like(xi), 0.0, 0.0)
    with pytest.raises(ValueError):
        solve_phi(PoissonProblem(xi, np.ones_like(xi), 0.0, 0.0), np.full_like(xi, np.nan))


def test_residual_below_tolerance_and_monotone():
    xi = grid()
    v = 1 + 0.3 * np.exp(-xi**2) + 0.1 * np.tanh(xi)
    phi, stats = solve_phi(PoissonProblem(xi, v, -np.log(v[0]), -np.log(v[-1])))
    assert np.max(np.abs(poisson_residual(phi, v, xi[1] - xi[0]))) < 1e-12
    assert all(b < a for a, b in zip(stats.history, stats.history[1:]))
    assert stats.iterations <= 8


def test_damping_from_poor_guess():
    xi = grid()
    v = 1 + 0.3 * np.exp(-xi**2)
    phi, stats = solve_phi(PoissonProblem(xi, v, 0.0, 0.0), np.full_like(xi, 3.0))
    assert stats.residual < 1e-12
    assert all(b < a for a, b in zip(stats.history, stats.history[1:]))


def test_iteration_cap_reported():
    xi = grid()
    v = 1 + 0.3 * np.exp(-xi**2)
    with pytest.raises(PoissonNonconvergence):
        solve_phi(PoissonProblem(xi, v, 0.0, 0.0, newton_max_iter=1), np.full_like(xi, 3.0))


def test_reflection_symmetry():
    xi = grid()
    v = 1 + 0.2 * np.exp(-(xi - 1) ** 2) + 0.05 * np.tanh(xi)
    phi, _ = solve_phi(PoissonProblem(xi, v, 0.1, -0.2))
    phr, _ = solve_phi(PoissonProblem(xi, v[::-1].copy(), -0.2, 0.1))
    np.testing.assert_allclose(phr[::-1], phi, atol=1e-13)


def test_manufactured_second_order():
    rows = manufactured_study()
    orders = [r["observed_order"] for r in rows[1:]]
    assert len(orders) == 3
    for o in orders:
        assert abs(o - 2.0) <= 0.2


def test_recovers_shock_potential(profile):
    # restricted to the profile's core; Dirichlet data from the profile itself
    core = np.abs(profile.xi) <= 60
    xi = profile.xi[core]
    ev = profile.eval(xi)
    phi, _ = solve_phi(PoissonProblem(xi, ev["v"], ev["phi"][0], ev["phi"][-1]))
    err = np.max(np.abs(phi - ev["phi"]))
    assert err < 1e-5 * (xi[1] - xi[0]) ** 2 / 0.05**2


def test_electric_force_vanishes_for_constant_potential():
    xi = grid()
    v = 1 + 0.1 * np.exp(-xi**2)
    Phi, dPhi = electric_force(v, np.full_like(xi, 0.3), xi[1] - xi[0])
    assert np.max(np.abs(Phi)) < 1e-12 and np.max(np.abs(dPhi)) < 1e-10


def test_electric_force_analytic_sine():
    errs = []
    for n in (401, 801):
        xi = grid(n)
        d = xi[1] - xi[0]
        k = 0.7
        phi = np.sin(k * xi)
        Phi, _ = electric_force(np.ones_like(xi), phi, d)
        exact = 0.5 * (k * np.cos(k * xi)) ** 2 + k * k * np.sin(k * xi)
        errs.append(np.max(np.abs(Phi - exact)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_electric_force_derivative_product_rule():
    # with g = phi'/v: Phi' = -(1/v) g'' - (1/v)' g' + g g'
    errs = []
    for n in (801, 1601):
        xi = grid(n)
        d = xi[1] - xi[0]
        v = 1 + 0.2 * np.exp(-xi**2 / 4)
        phi = -np.log(v) + 0.1 * np.sin(xi) * np.exp(-xi**2 / 8)
        g = ddx(phi, d) / v
        _, dPhi = electric_force(v, phi, d)
        rhs = -ddx(ddx(g, d), d) / v - ddx(1 / v, d) * ddx(g, d) + g * ddx(g, d)
        sl = slice(10, -10)
        errs.append(np.max(np.abs(dPhi[sl] - rhs[sl])))
    assert errs[1] < errs[0] / 3


def test_flux_divergence_second_order():
    errs = []
    for n in (201, 401):
        xi = grid(n)
        d = xi[1] - xi[0]
        v = 1 + 0.2 * np.exp(-xi**2)
        f = np.sin(xi)
        vx = -0.4 * xi * np.exp(-xi**2)
        exact = (-np.sin(xi) / v - np.cos(xi) * vx / v**2)[1:-1]
        errs.append(np.max(np.abs(flux_divergence(f, v, d) - exact)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
