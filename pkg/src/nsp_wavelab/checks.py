"""Bundled self-checks behind the ``verify`` subcommand.

``quick`` runs closed-form and limit checks; ``full`` adds the numerical
studies (profile solve, Poisson convergence, decay rates, a short run).
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from nsp_wavelab.thermo import (GammaMembershipError, lambda1, lambda2, modified_pressure,
                                shock_speed, solve_riemann)

CANONICAL = (1.0, 0.0, 1.2)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _canonical_fan():
    from nsp_wavelab.config import RunConfig

    c = RunConfig()
    return solve_riemann(c.v_minus, c.u_minus, c.v_plus, c.u_plus)


def check_riemann():
    fan = _canonical_fan()
    sigma = math.sqrt((2 / 1.1 - 2 / 1.2) / (1.2 - 1.1))
    ok = abs(fan.v_mid - 1.1) < 1e-8 and abs(fan.sigma - sigma) < 1e-10
    ok &= lambda2(fan.v_plus) < fan.sigma < lambda2(fan.v_mid)
    return ok, f"v_mid={fan.v_mid:.12g} sigma={fan.sigma:.12g}"


def check_gamma_reject():
    try:
        solve_riemann(1.2, 0.0, 1.0, 0.0)
    except GammaMembershipError:
        return True, "v_plus < v_minus rejected"
    return False, "accepted a state outside the admissible region"


def check_zero_shock_speed():
    s = shock_speed(1.1, 0.2, 1.1, 0.2)
    return abs(s - lambda2(1.1)) < 1e-14, f"sigma={s!r}"


def check_burgers_limits():
    from nsp_wavelab.rarefaction import burgers_eval

    wl, wm = lambda1(1.0), lambda1(1.1)
    t = 3.0
    mid = burgers_eval(wl, wm, t, t * 0.5 * (wl + wm))
    far = burgers_eval(wl, wm, t, np.array([-1e3, 1e3]))
    ok = abs(mid - 0.5 * (wl + wm)) < 1e-12 and abs(far[0] - wl) < 1e-12 and abs(far[1] - wm) < 1e-12
    return bool(ok), f"mid={float(mid):.15g}"


def check_rarefaction_midpoint():
    from nsp_wavelab.rarefaction import RarefactionField, rarefaction_eval

    fan = _canonical_fan()
    # at t = 0 the Burgers time is 1, so the midpoint characteristic sits at x = (w- + wm)/2
    wbar = 0.5 * (lambda1(1.0) + lambda1(1.1))
    v, _, phi = rarefaction_eval(RarefactionField(fan), 0.0, np.array([wbar]))
    expect = -math.sqrt(2) / wbar
    ok = abs(v[0] - expect) < 1e-12 and abs(phi[0] + math.log(v[0])) < 1e-15
    return bool(ok), f"v(0,0)={v[0]:.10f}"


def check_profile_fixed_points():
    from nsp_wavelab.shock_profile import equilibrium, profile_rhs

    fan = _canonical_fan()
    r = max(np.max(np.abs(profile_rhs(equilibrium(v), fan.sigma))) for v in (fan.v_mid, fan.v_plus))
    return bool(r < 1e-15), f"max rhs at equilibria={r:.3g}"


def check_poisson_trivial():
    from nsp_wavelab.poisson import PoissonProblem, solve_phi

    xi = np.linspace(-10, 10, 401)
    phi, _ = solve_phi(PoissonProblem(xi, np.ones_like(xi), 0.0, 0.0), np.zeros_like(xi))
    err = float(np.max(np.abs(phi)))
    return err < 1e-14, f"max|phi|={err:.3g}"


def check_weight_limits():
    from nsp_wavelab.shift import weight, weight_bounds

    dS = 0.1
    a, _ = weight(np.array([1.1, 1.2]), 1.1, dS)
    right = 1.0 + (modified_pressure(1.1) - modified_pressure(1.2)) / math.sqrt(dS)
    ok = abs(a[0] - 1.0) < 1e-15 and abs(a[1] - right) < 1e-14 and a[1] <= weight_bounds(1.1, dS)[1]
    return bool(ok), f"right limit={a[1]:.6f}"


def check_shift_constant():
    from nsp_wavelab.shift import shift_constant, shift_constant_general

    a, b = shift_constant(1.0, 1.1), shift_constant_general(1.0, 1.1)
    return abs(a - b) < 1e-14, f"M={a:.15g}"


def check_relative_quantities():
    from nsp_wavelab.functionals import relative_pressure, relative_Q

    q = float(relative_Q(2.0, 1.0))
    p = float(relative_pressure(2.0, 1.0))
    ok = abs(q - (2 - 2 * math.log(2))) < 1e-15 and abs(p - 1.0) < 1e-15
    return ok, f"Q(2|1)={q:.6f} p(2|1)={p:.6f}"


def check_profile_solve():
    from nsp_wavelab.shock_profile import shode_residual, solve_profile, verify_tail

    fan = _canonical_fan()
    prof = solve_profile(fan)
    res = shode_residual(prof)
    tail = verify_tail(prof)
    v0 = float(prof.eval(np.array([0.0]))["v"][0])
    ok = (max(res.values()) < 1e-7 and abs(v0 - prof.anchor) < 1e-8
          and np.all(np.diff(prof.state[0]) > 0) and tail.exponential and tail.rates_agree)
    return bool(ok), f"residual={max(res.values()):.3g} R2=({tail.r2_left:.4f},{tail.r2_right:.4f})"


def check_poisson_order():
    from nsp_wavelab.poisson import manufactured_study

    rows = manufactured_study()
    orders = [r["observed_order"] for r in rows[1:]]
    return all(abs(o - 2.0) <= 0.2 for o in orders), "orders=" + ",".join(f"{o:.3f}" for o in orders)


def check_rarefaction_tv():
    from nsp_wavelab.rarefaction import RarefactionField, verify_decay

    fan = _canonical_fan()
    rep = verify_decay(RarefactionField(fan), [0.0, 10.0, 100.0], p=1.0)
    spread = float(np.max(rep.first) / np.min(rep.first) - 1.0)
    return spread < 0.01, f"L1 spread={spread:.3g}"


def check_short_run():
    from nsp_wavelab.config import RunConfig
    from nsp_wavelab.evolve import run

    cfg = RunConfig(L_dom=60.0, dxi=0.2, t_final=1.0, report_interval=0.5)
    res = run(cfg)
    ok = len(res.reports) >= 2 and res.min_v > 0
    return ok, f"reports={len(res.reports)} min_v={res.min_v:.6f}"


QUICK = [check_riemann, check_gamma_reject, check_zero_shock_speed, check_burgers_limits,
         check_rarefaction_midpoint, check_profile_fixed_points, check_poisson_trivial,
         check_weight_limits, check_shift_constant, check_relative_quantities]
FULL = QUICK + [check_profile_solve, check_poisson_order, check_rarefaction_tv, check_short_run]


def _run_one(fn) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing check is a failed check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(fn.__name__.removeprefix("check_"), bool(ok), detail, time.perf_counter() - t0)


def thread_count() -> int:
    raw = os.environ.get("NSP_WAVELAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_checks(profile: str = "quick", threads: int | None = None) -> list[CheckResult]:
    suite = {"quick": QUICK, "full": FULL}[profile]
    threads = thread_count() if threads is None else threads
    if threads == 1:
        return [_run_one(fn) for fn in suite]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_one, suite))
