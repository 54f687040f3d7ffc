"""Smooth approximate 1-rarefaction built on the inviscid Burgers equation.

The Burgers data is ``w0(x) = (wm + w-)/2 + (wm - w-)/2 tanh(x)`` with
``w- = lambda1(v-)`` and ``wm = lambda1(vm)``.  Since ``w0' > 0`` the
characteristics never cross and ``w(t, x) = w0(x0)`` with ``x = x0 + t w0(x0)``.
The rarefaction at time ``t`` uses the Burgers solution at ``1 + t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from nsp_wavelab.thermo import SQRT2, RiemannFan, DomainError, lambda1


def _w0(x, wm, wl):
    return 0.5 * (wm + wl) + 0.5 * (wm - wl) * np.tanh(x)


def _sech2(x):
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def _w0_prime(x, wm, wl):
    return 0.5 * (wm - wl) * _sech2(x)


def _w0_second(x, wm, wl):
    return -(wm - wl) * np.tanh(x) * _sech2(x)


def characteristic_foot(w_minus, w_mid, t, x, tol=1e-13, max_iter=60):
    """Solve ``x0 + t*w0(x0) = x`` for the foot of the characteristic.

    Safeguarded Newton inside the bracket ``[x - t*w_mid, x - t*w_minus]``.
    """
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    if t == 0.0:
        return x.copy()
    lo = x - t * w_mid
    hi = x - t * w_minus
    # start from the centred-wave approximation w ~ x/t, clipped to the bracket
    r = np.clip((2.0 * x / t - (w_mid + w_minus)) / (w_mid - w_minus), -0.999999, 0.999999)
    x0 = np.clip(np.arctanh(r), lo, hi)
    idx = np.arange(x.size)
    x0 = x0.ravel().copy()
    xs, lo, hi = x.ravel(), lo.ravel().copy(), hi.ravel().copy()
    for _ in range(max_iter):
        z, xz, lz, hz = x0[idx], xs[idx], lo[idx], hi[idx]
        f = z + t * _w0(z, w_mid, w_minus) - xz
        lz = np.where(f < 0.0, z, lz)
        hz = np.where(f > 0.0, z, hz)
        cand = z - f / (1.0 + t * _w0_prime(z, w_mid, w_minus))
        bad = (cand < lz) | (cand > hz)
        cand = np.where(bad, 0.5 * (lz + hz), cand)
        done = np.abs(cand - z) <= tol * (1.0 + np.abs(z))
        x0[idx], lo[idx], hi[idx] = cand, lz, hz
        idx = idx[~done]
        if idx.size == 0:
            break
    return x0.reshape(x.shape)
    return x0


def burgers_eval(w_minus, w_mid, t, x, tol=1e-13):
    """Exact Burgers solution with tanh data at time ``t``."""
    x0 = characteristic_foot(w_minus, w_mid, t, x, tol)
    return _w0(x0, w_mid, w_minus)


@dataclass(frozen=True)
class RarefactionField:
    fan: RiemannFan
    w_minus: float = field(init=False)
    w_mid: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "w_minus", lambda1(self.fan.v_minus))
        object.__setattr__(self, "w_mid", lambda1(self.fan.v_mid))

    @property
    def trivial(self) -> bool:
        return self.fan.delta_R == 0.0

    def burgers(self, t, x):
        """``(w, w_x, w_xx, w_t)`` of the Burgers solution at time ``1 + t``."""
        s = 1.0 + t
        x0 = characteristic_foot(self.w_minus, self.w_mid, s, x)
        w = _w0(x0, self.w_mid, self.w_minus)
        g1 = _w0_prime(x0, self.w_mid, self.w_minus)
        g2 = _w0_second(x0, self.w_mid, self.w_minus)
        den = 1.0 + s * g1
        wx = g1 / den
        wxx = g2 / den**3
        return w, wx, wxx, -w * wx


def rarefaction_eval(field: RarefactionField, t, x):
    """``(v, u, phi)`` of the approximate rarefaction at time ``t``."""
    fan = field.fan
    x = np.asarray(x, dtype=float)
    if field.trivial:
        v = np.full_like(x, fan.v_mid)
    else:
        w = field.burgers(t, x)[0]
        v = -SQRT2 / w
    u = fan.u_minus + SQRT2 * np.log(v / fan.v_minus)
    return v, u, -np.log(v)


def rarefaction_first_order(field: RarefactionField, t, x):
    """``(v, u, phi, v_x, u_x)`` from a single characteristic solve."""
    fan = field.fan
    x = np.asarray(x, dtype=float)
    if field.trivial:
        v = np.full_like(x, fan.v_mid)
        z = np.zeros_like(x)
        return v, np.full_like(x, fan.u_mid), -np.log(v), z, z
    w, wx, _, _ = field.burgers(t, x)
    v = -SQRT2 / w
    vx = SQRT2 * wx / w**2
    u = fan.u_minus + SQRT2 * np.log(v / fan.v_minus)
    return v, u, -np.log(v), vx, SQRT2 * vx / v


def rarefaction_derivatives(field: RarefactionField, t, x, order=2):
    """x-derivatives ``[(v_x, u_x), (v_xx, u_xx), ...]`` up to ``order``.

    Orders 1-2 come from the characteristic map; order 3 is a centred
    difference of the order-2 values with step 1e-4.
    """
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order!r}")
    x = np.asarray(x, dtype=float)
    if field.trivial:
        z = np.zeros_like(x)
        return [(z, z)] * order
    w, wx, wxx, _ = field.burgers(t, x)
    v = -SQRT2 / w
    vx = SQRT2 * wx / w**2
    vxx = SQRT2 * (wxx / w**2 - 2.0 * wx**2 / w**3)
    ux = SQRT2 * vx / v
    uxx = SQRT2 * (vxx / v - vx**2 / v**2)
    out = [(vx, ux), (vxx, uxx)][:order]
    if order == 3:
        h = 1e-4
        (_, (vp, up)) = rarefaction_derivatives(field, t, x + h, 2)
        (_, (vm, um)) = rarefaction_derivatives(field, t, x - h, 2)
        out.append(((vp - vm) / (2 * h), (up - um) / (2 * h)))
    return out


def rarefaction_time_derivatives(field: RarefactionField, t, x):
    """``(v_t, u_t)`` in the fixed frame, via ``w_t = -w w_x``."""
    x = np.asarray(x, dtype=float)
    if field.trivial:
        z = np.zeros_like(x)
        return z, z
    w, _, _, wt = field.burgers(t, x)
    v = -SQRT2 / w
    vt = SQRT2 * wt / w**2
    return vt, SQRT2 * vt / v


def fan_window(field: RarefactionField, t: float, pad: float = 40.0) -> tuple[float, float]:
    """Interval in x covering the fan at time ``t`` plus tanh tails."""
    s = 1.0 + t
    return field.w_minus * s - pad, field.w_mid * s + pad


@dataclass
class DecayReport:
    p: float
    times: np.ndarray
    first: np.ndarray
    second: np.ndarray
    first_exponent: float
    second_exponent: float
    first_constant: float
    second_constant: float

    def rows(self):
        for t, a, b in zip(self.times, self.first, self.second):
            yield {"t": float(t), "p": self.p, "norm_vx": float(a), "norm_vxx": float(b)}


def _lp_norm(f, dx, p):
    if np.isinf(p):
        return float(np.max(np.abs(f)))
    return float(np.sum(np.abs(f) ** p) * dx) ** (1.0 / p)


def verify_decay(field: RarefactionField, times, p=np.inf, points_per_unit=40) -> DecayReport:
    """Discrete L^p norms of ``v_x`` and ``v_xx`` and fitted power-law decay.

    The fitted exponent is the slope of log(norm) against log(1 + t) between
    the last two times; the constant is norm * (1 + t)^(-exponent) at the end.
    """
    times = np.asarray(times, dtype=float)
    first, second = [], []
    for t in times:
        a, b = fan_window(field, t)
        n = int((b - a) * points_per_unit) + 1
        x = np.linspace(a, b, n)
        (vx, _), (vxx, _) = rarefaction_derivatives(field, t, x, 2)
        dx = x[1] - x[0]
        first.append(_lp_norm(vx, dx, p))
        second.append(_lp_norm(vxx, dx, p))
    first = np.array(first)
    second = np.array(second)
    if len(times) >= 2:
        lt = np.log1p(times[-2:])
        e1 = float(np.diff(np.log(first[-2:]))[0] / np.diff(lt)[0])
        e2 = float(np.diff(np.log(second[-2:]))[0] / np.diff(lt)[0])
    else:
        e1 = e2 = float("nan")
    c1 = float(first[-1] * (1.0 + times[-1]) ** (-e1)) if np.isfinite(e1) else float("nan")
    c2 = float(second[-1] * (1.0 + times[-1]) ** (-e2)) if np.isfinite(e2) else float("nan")
    return DecayReport(float(p), times, first, second, e1, e2, c1, c2)
