"""Viscous-electrostatic 2-shock profile as a heteroclinic orbit.

The traveling-wave ODEs reduce, with the mass first integral
``u = u_m - sigma (v - v_m)`` and the variables ``q = (ln v)'`` and
``z = phi'/v``, to the autonomous system

    v' = v q
    q' = -(sigma^2 v q - q/v + z) / sigma
    phi' = v z
    z' = v e^phi - 1

whose equilibria form the curve ``(v, 0, -ln v, 0)``.  The quantity

    I = sigma^2 v + 1/v + sigma q + e^phi - z^2/2

is conserved, which singles out ``v_m`` and ``v_+`` on that curve.  Each
equilibrium carries a fast Poisson saddle (rates of order one) on top of the
slow shock scale (rate of order delta_S), so the connection is computed as a
boundary value problem with projective conditions on the truncated domain
and continued by the linear slow tails outside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_bvp, solve_ivp
from scipy.optimize import brentq

from nsp_wavelab.thermo import RiemannFan, pressure


class EigenstructureError(RuntimeError):
    pass


class ConnectionError_(RuntimeError):
    """The boundary value solve for the heteroclinic orbit failed."""


def profile_rhs(state, sigma: float):
    """Right-hand side of the reduced 4D traveling-wave system."""
    v, q, phi, z = state
    if np.any(np.asarray(v) <= 0.0):
        raise FloatingPointError("specific volume left the positive axis")
    return np.array([
        v * q,
        -(sigma * sigma * v * q - q / v + z) / sigma,
        v * z,
        v * np.exp(phi) - 1.0,
    ])


def profile_jacobian(state, sigma: float) -> np.ndarray:
    v, q, phi, z = (float(s) for s in state)
    return np.array([
        [q, v, 0.0, 0.0],
        [-(sigma * sigma * q + q / v**2) / sigma, -(sigma * sigma * v - 1.0 / v) / sigma, 0.0, -1.0 / sigma],
        [z, 0.0, 0.0, v],
        [math.exp(phi), 0.0, v * math.exp(phi), 0.0],
    ])


def first_integral(state, sigma: float):
    v, q, phi, z = state
    return sigma * sigma * v + 1.0 / v + sigma * q + np.exp(phi) - 0.5 * z * z


def equilibrium(v: float) -> np.ndarray:
    return np.array([v, 0.0, -math.log(v), 0.0])


@dataclass(frozen=True)
class FixedPointModes:
    """Eigen-decomposition at an equilibrium, split by role."""
    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    slow: int
    fast_unstable: int
    fast_stable: int
    neutral: int


def fixed_point_modes(v: float, sigma: float) -> FixedPointModes:
    """Classify the eigenvalues at ``(v, 0, -ln v, 0)``.

    One eigenvalue vanishes (the equilibrium curve); of the other three the
    one of smallest modulus is the slow shock mode.
    """
    vals, vecs = np.linalg.eig(profile_jacobian(equilibrium(v), sigma))
    if np.max(np.abs(vals.imag)) > 1e-10:
        raise EigenstructureError(f"complex eigenvalues at v={v}: {vals}")
    vals = vals.real
    vecs = vecs.real
    neutral = int(np.argmin(np.abs(vals)))
    rest = [i for i in range(4) if i != neutral]
    slow = min(rest, key=lambda i: abs(vals[i]))
    fast = [i for i in rest if i != slow]
    fu = max(fast, key=lambda i: vals[i])
    fs = min(fast, key=lambda i: vals[i])
    if not (vals[fu] > 0.0 > vals[fs]):
        raise EigenstructureError(f"no fast saddle at v={v}: {vals}")
    if vecs[0, slow] < 0.0:
        vecs[:, slow] *= -1.0
    return FixedPointModes(vals, vecs, np.linalg.inv(vecs), slow, fu, fs, neutral)


def _quasineutral_profile(fan: RiemannFan, x: np.ndarray) -> np.ndarray:
    """Navier-Stokes (z = 0) profile centred at 0, used as the initial guess."""
    vm, vp, s = fan.v_mid, fan.v_plus, fan.sigma

    def f(_, v):
        return v * (s * s * (vm - v) + 2.0 / vm - 2.0 / v) / s

    mid = 0.5 * (vm + vp)
    right = solve_ivp(f, [0.0, max(x[-1], 1e-9)], [mid], rtol=1e-11, atol=1e-14, dense_output=True)
    left = solve_ivp(f, [0.0, min(x[0], -1e-9)], [mid], rtol=1e-11, atol=1e-14, dense_output=True)
    v = np.where(x >= 0.0, right.sol(np.maximum(x, 0.0))[0], left.sol(np.minimum(x, 0.0))[0])
    q = np.array([f(0.0, vi) for vi in v]) / v
    return np.vstack([v, q, -np.log(v), -q / v])


@dataclass
class ShockProfile:
    """Sampled 2-shock profile anchored at ``v(0) = (v_m + v_+)/2``."""
    fan: RiemannFan
    xi: np.ndarray
    state: np.ndarray          # rows v, q, phi, z
    tail_rates: tuple[float, float]
    launch_offset: float
    bvp_nodes: int = 0
    _slopes: np.ndarray | None = field(default=None, repr=False)

    @property
    def sigma(self) -> float:
        return self.fan.sigma

    @property
    def dxi(self) -> float:
        return float(self.xi[1] - self.xi[0]) if len(self.xi) > 1 else 0.0

    @property
    def L(self) -> float:
        return float(self.xi[-1])

    @property
    def trivial(self) -> bool:
        return self.fan.delta_S == 0.0

    @property
    def anchor(self) -> float:
        return 0.5 * (self.fan.v_mid + self.fan.v_plus)

    def _interp(self, x):
        """Cubic Hermite interpolation on the uniform sample grid.

        Node slopes are the exact ODE right-hand side, so the interpolant is C1.
        """
        if self._slopes is None:
            self._slopes = profile_rhs(self.state, self.sigma)
        h = self.dxi
        s = (x - self.xi[0]) / h
        k = np.clip(np.floor(s).astype(np.intp), 0, len(self.xi) - 2)
        tau = s - k
        t2 = tau * tau
        t3 = t2 * tau
        y, m = self.state, self._slopes
        return ((2 * t3 - 3 * t2 + 1) * y[:, k] + (t3 - 2 * t2 + tau) * h * m[:, k]
                + (3 * t2 - 2 * t3) * y[:, k + 1] + (t3 - t2) * h * m[:, k + 1])

    def eval_state(self, xi) -> tuple[np.ndarray, np.ndarray]:
        """Interpolated ``(v, q, phi, z)`` and its derivative at ``xi``."""
        xi = np.asarray(xi, dtype=float)
        fan = self.fan
        if self.trivial:
            y = np.broadcast_to(equilibrium(fan.v_mid)[:, None], (4,) + xi.shape).copy()
            return y, np.zeros_like(y)
        inside = (xi >= self.xi[0]) & (xi <= self.xi[-1])
        y = np.empty((4,) + xi.shape)
        left = equilibrium(fan.v_mid)
        right = equilibrium(fan.v_plus)
        y[:] = np.where(xi < 0.0, left[:, None] if xi.ndim else left, right[:, None] if xi.ndim else right)
        dy = np.zeros_like(y)
        if np.any(inside):
            yi = self._interp(xi[inside])
            y[:, inside] = yi
            dy[:, inside] = profile_rhs(yi, self.sigma)
        return y, dy

    def eval(self, xi) -> dict[str, np.ndarray]:
        """Profile values and derivatives; constant far-field outside ``[-L, L]``."""
        fan = self.fan
        y, dy = self.eval_state(xi)
        v, q, phi, z = y
        dv, dq, dphi, dz = dy
        vpp = dv * q + v * dq
        phipp = dv * z + v * dz
        u = fan.u_mid - fan.sigma * (v - fan.v_mid)
        up = -fan.sigma * dv
        return {
            "v": v, "u": u, "phi": phi, "h": u - q,
            "vp": dv, "up": up, "phip": dphi,
            "vpp": vpp, "upp": -fan.sigma * vpp, "phipp": phipp,
            "hp": up - dq, "q": q, "z": z,
        }


def profile_eval(profile: ShockProfile, xi) -> dict[str, np.ndarray]:
    return profile.eval(xi)


def default_half_length(fan: RiemannFan) -> float:
    if fan.delta_S == 0.0:
        return 200.0
    modes = fixed_point_modes(fan.v_mid, fan.sigma)
    return max(40.0 / modes.values[modes.slow], 200.0)


def default_spacing(fan: RiemannFan) -> float:
    return min(0.05, 0.01 / fan.delta_S) if fan.delta_S > 0 else 0.05


def solve_profile(fan: RiemannFan, L: float | None = None, tol: float = 1e-10,
                  dxi: float | None = None, tail_depth: float = 1e-9,
                  launch_offset: float | None = None) -> ShockProfile:
    """Compute, anchor and resample the 2-shock profile for ``fan``.

    The orbit leaves ``v_m`` inside its two-dimensional unstable manifold and
    enters ``v_+`` inside its two-dimensional stable manifold.  On the
    truncated interval the left end is pinned to the slow unstable direction
    at amplitude ``launch_offset`` (the fast-stable and neutral components
    vanish) and the right end has no fast-unstable component.  Beyond the
    truncated interval the linear slow tails are used.
    """
    if dxi is None:
        dxi = default_spacing(fan)
    if fan.delta_S == 0.0:
        L = 200.0 if L is None else L
        L = math.ceil(L / dxi - 1e-9) * dxi
        n = int(round(2 * L / dxi)) + 1
        xi = np.linspace(-L, L, n)
        state = np.repeat(equilibrium(fan.v_mid)[:, None], n, axis=1)
        return ShockProfile(fan, xi, state, (0.0, 0.0), 0.0)

    sigma = fan.sigma
    left_modes = fixed_point_modes(fan.v_mid, sigma)
    right_modes = fixed_point_modes(fan.v_plus, sigma)
    mu_l = left_modes.values[left_modes.slow]
    mu_r = -right_modes.values[right_modes.slow]
    if not (mu_l > 0.0 and mu_r > 0.0):
        raise EigenstructureError(
            f"slow modes have wrong signs: left {mu_l:.3e}, right {-mu_r:.3e}")
    if L is None:
        L = max(40.0 / mu_l, 200.0)
    L = math.ceil(L / dxi - 1e-9) * dxi

    depth = -math.log(tail_depth)
    a = -(depth / mu_l + 20.0)
    b = depth / mu_r + 20.0
    p_m = equilibrium(fan.v_mid)
    p_p = equilibrium(fan.v_plus)
    lm, lp = left_modes.left, right_modes.left
    natural = float(lm[left_modes.slow] @ (_quasineutral_profile(fan, np.array([a, 0.0]))[:, 0] - p_m))
    slide = 0.0
    if launch_offset is None:
        launch_offset = natural
    elif launch_offset * natural > 0.0:
        # the requested left amplitude translates the orbit; move the right end
        # with it so the right tail keeps the same depth
        slide = -math.log(launch_offset / natural) / mu_l
        b += slide
    x0 = np.linspace(a, b, max(400, int((b - a) / 0.25)))
    guess = _quasineutral_profile(fan, x0 - slide)

    def bc(ya, yb):
        da = ya - p_m
        db = yb - p_p
        return np.array([
            lm[left_modes.fast_stable] @ da,
            lm[left_modes.neutral] @ da,
            lm[left_modes.slow] @ da - launch_offset,
            lp[right_modes.fast_unstable] @ db,
        ])

    def rhs(x, y):
        return profile_rhs(y, sigma)

    # a loose solve first; tightening from a converged orbit avoids runaway mesh refinement
    sol = solve_bvp(rhs, bc, x0, guess, tol=max(tol, 1e-6), max_nodes=100_000)
    if sol.status == 0 and tol < 1e-6:
        sol = solve_bvp(rhs, bc, sol.x, sol.y, tol=tol, max_nodes=100_000)
    if sol.status != 0:
        raise ConnectionError_(
            f"profile solve failed for delta_S={fan.delta_S:.4g}: {sol.message}; "
            "try a smaller shock amplitude")
    vals = sol.sol(sol.x)[0]
    if np.any(np.diff(vals) <= 0.0) and np.any(np.diff(vals) < -1e-12):
        raise ConnectionError_("profile is not monotone; connection not found")

    mid = 0.5 * (fan.v_mid + fan.v_plus)
    j = int(np.searchsorted(vals, mid))
    shift = brentq(lambda s: sol.sol(s)[0] - mid, sol.x[max(j - 1, 0)], sol.x[min(j, len(sol.x) - 1)],
                   xtol=1e-15, rtol=1e-15)

    n = int(round(2 * L / dxi)) + 1
    xi = np.linspace(-L, L, n)
    xs = xi + shift
    state = np.empty((4, n))
    inside = (xs >= a) & (xs <= b)
    state[:, inside] = sol.sol(xs[inside])
    ya, yb = sol.sol(a), sol.sol(b)
    c_l = lm[left_modes.slow] @ (ya - p_m)
    c_r = lp[right_modes.slow] @ (yb - p_p)
    r_l = left_modes.right[:, left_modes.slow]
    r_r = right_modes.right[:, right_modes.slow]
    lo = xs < a
    hi = xs > b
    state[:, lo] = p_m[:, None] + c_l * r_l[:, None] * np.exp(mu_l * (xs[lo] - a))[None, :]
    state[:, hi] = p_p[:, None] + c_r * r_r[:, None] * np.exp(-mu_r * (xs[hi] - b))[None, :]
    return ShockProfile(fan, xi, state, (float(mu_l), float(mu_r)), float(launch_offset),
                        bvp_nodes=len(sol.x))


def shode_residual(profile: ShockProfile) -> dict[str, float]:
    """Max residual of the unreduced traveling-wave equations on the samples.

    Second-order centred differences of the sampled ``(v, u, phi)``; the
    viscous and Poisson fluxes use face averages of ``1/v``.
    """
    xi = profile.xi
    d = xi[1] - xi[0]
    s = profile.sigma
    v = profile.state[0]
    phi = profile.state[2]
    u = profile.fan.u_mid - s * (v - profile.fan.v_mid)
    inv_face = 0.5 * (1.0 / v[1:] + 1.0 / v[:-1])

    def cdiff(f):
        return (f[2:] - f[:-2]) / (2 * d)

    def flux_div(f):
        flux = (f[1:] - f[:-1]) / d * inv_face
        return (flux[1:] - flux[:-1]) / d

    vi = v[1:-1]
    mass = -s * cdiff(v) - cdiff(u)
    mom = -s * cdiff(u) + cdiff(pressure_array(v)) - flux_div(u) + cdiff(phi) / vi
    pois = -flux_div(phi) - 1.0 + vi * np.exp(phi[1:-1])
    return {"mass": float(np.max(np.abs(mass))), "momentum": float(np.max(np.abs(mom))),
            "poisson": float(np.max(np.abs(pois)))}


def pressure_array(v):
    return 1.0 / np.asarray(v)


def _loglinear_fit(x, y):
    ly = np.log(y)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


@dataclass
class TailReport:
    delta_S: float
    rate_left: float
    rate_right: float
    r2_left: float
    r2_right: float
    rate_left_deriv: float
    rate_right_deriv: float
    r2_left_deriv: float
    r2_right_deriv: float
    max_vp: float
    max_vp_over_delta2: float

    @property
    def exponential(self) -> bool:
        return min(self.r2_left, self.r2_right) > 0.99

    @property
    def rates_agree(self) -> bool:
        ratio = self.rate_left / self.rate_right
        return 0.25 <= ratio <= 4.0

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["exponential"] = self.exponential
        d["rates_agree"] = self.rates_agree
        return d


def verify_tail(profile: ShockProfile, upper: float = 1e-2, lower: float = 1e-9) -> TailReport:
    """Log-linear fits of the deviation from each end state on both tails.

    Each tail is the outer 30% of the stretch where the relative deviation
    ``|v - v_end| / delta_S`` lies between ``lower`` and ``upper``.
    """
    fan = profile.fan
    xi = profile.xi
    v = profile.state[0]
    vp = profile.eval(xi)["vp"]
    dS = fan.delta_S

    def window(mask):
        idx = np.nonzero(mask)[0]
        k = max(int(0.3 * len(idx)), 3)
        return idx, k

    dev_l = (v - fan.v_mid) / dS
    dev_r = (fan.v_plus - v) / dS
    idx_l, k_l = window((xi < 0) & (dev_l < upper) & (dev_l > lower))
    idx_r, k_r = window((xi > 0) & (dev_r < upper) & (dev_r > lower))
    sl = idx_l[:k_l]
    sr = idx_r[-k_r:]
    rl, r2l = _loglinear_fit(xi[sl], dev_l[sl])
    rr, r2r = _loglinear_fit(xi[sr], dev_r[sr])
    rld, r2ld = _loglinear_fit(xi[sl], np.abs(vp[sl]))
    rrd, r2rd = _loglinear_fit(xi[sr], np.abs(vp[sr]))
    mvp = float(np.max(np.abs(vp)))
    return TailReport(dS, rl, -rr, r2l, r2r, rld, -rrd, r2ld, r2rd, mvp, mvp / dS**2)
