"""Time integration of the Navier-Stokes-Poisson system in the shock frame.

Unknowns live on a uniform grid ``xi = x - sigma t`` on ``[-L_dom, L_dom]``.
The right end node and the left velocity are pinned to the composite wave at
the current time and shift. Both characteristics enter at the right end, but
the left end is an outflow boundary for ``v`` (it is carried out at speed
``-sigma``), so by default ``v`` there follows the mass equation instead of
being pinned. The potential is re-solved after every Runge-Kutta stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from nsp_wavelab.config import LEFT_BOUNDARIES, ConfigError, RunConfig
from nsp_wavelab.functionals import EnergyReport, energy_report
from nsp_wavelab.poisson import PoissonProblem, ddx, electric_force, flux_divergence, solve_phi
from nsp_wavelab.rarefaction import RarefactionField, rarefaction_first_order
from nsp_wavelab.shift import ShiftState, shift_velocity, trapezoid
from nsp_wavelab.shock_profile import ShockProfile, solve_profile
from nsp_wavelab.thermo import RiemannFan, solve_riemann

ALL_TERMS = frozenset({"pressure", "viscosity", "electric"})


class SimulationError(RuntimeError):
    """Raised on loss of positivity or non-finite fields; carries the last state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


@dataclass
class CompositeWave:
    fan: RiemannFan
    rarefaction: RarefactionField
    profile: ShockProfile

    @classmethod
    def from_fan(cls, fan: RiemannFan, profile: ShockProfile | None = None) -> "CompositeWave":
        if profile is None:
            profile = solve_profile(fan)
        return cls(fan, RarefactionField(fan), profile)

    def eval(self, t: float, X: float, xi) -> dict:
        """Composite values and xi-derivatives, plus the two components."""
        fan = self.fan
        xi = np.asarray(xi, dtype=float)
        x = xi + fan.sigma * t
        vR, uR, phiR, vR_x, uR_x = rarefaction_first_order(self.rarefaction, t, x)
        S = self.profile.eval(xi - X)
        return {
            "v": vR + S["v"] - fan.v_mid,
            "u": uR + S["u"] - fan.u_mid,
            "phi": phiR + S["phi"] - fan.phi_mid,
            "h": uR + S["h"] - fan.u_mid,
            "v_xi": vR_x + S["vp"],
            "u_xi": uR_x + S["up"],
            "phi_xi": -vR_x / vR + S["phip"],
            "vR": vR, "uR": uR, "phiR": phiR, "vR_xi": vR_x, "uR_xi": uR_x,
            "vS": S["v"], "uS": S["u"], "phiS": S["phi"], "hS": S["h"],
            "vS_xi": S["vp"], "uS_xi": S["up"], "phiS_xi": S["phip"], "hS_xi": S["hp"],
            "v_mid": fan.v_mid, "delta_S": fan.delta_S,
        }


def composite_eval(wave: CompositeWave, t: float, X: float, xi) -> dict:
    return wave.eval(t, X, xi)


@dataclass
class GridState:
    t: float
    X: float
    xi: np.ndarray
    v: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    dt_last: float = 0.0

    @property
    def dxi(self) -> float:
        return float(self.xi[1] - self.xi[0])

    def copy(self) -> "GridState":
        return GridState(self.t, self.X, self.xi, self.v.copy(), self.u.copy(), self.phi.copy(),
                         self.dt_last)


def make_grid(L_dom: float, dxi: float) -> np.ndarray:
    n = int(round(2 * L_dom / dxi))
    return np.linspace(-L_dom, L_dom, n + 1)


def gaussian_bump(xi, center: float, width: float, amplitude: float):
    g = np.exp(-((xi - center) ** 2) / (2 * width**2))
    g[g < 1e-14] = 0.0
    return amplitude * g


def solve_potential(state: GridState, comp_ends: dict, guess=None) -> np.ndarray:
    prob = PoissonProblem(state.xi, state.v, float(comp_ends["phi"][0]), float(comp_ends["phi"][-1]))
    phi, _ = solve_phi(prob, state.phi if guess is None else guess)
    return phi


def initialize(config: RunConfig, wave: CompositeWave | None = None):
    """Perturbed composite wave on the grid with a Poisson-consistent potential."""
    if wave is None:
        fan = solve_riemann(config.v_minus, config.u_minus, config.v_plus, config.u_plus)
        wave = CompositeWave.from_fan(fan)
    fan = wave.fan
    xi = make_grid(config.L_dom, config.dxi)
    comp = wave.eval(0.0, 0.0, xi)
    v = comp["v"] + gaussian_bump(xi, config.xi0_v, config.w_v, config.A_v)
    u = comp["u"] + gaussian_bump(xi, config.xi0_u, config.w_u, config.A_u)
    if not np.min(v) > 0.0:
        raise ConfigError(f"A_v: perturbation makes min(v) = {np.min(v):.4g} nonpositive")
    state = GridState(0.0, 0.0, xi, v, u, -np.log(v))
    state.phi = solve_potential(state, {"phi": comp["phi"][[0, -1]]}, -np.log(v))
    shift = ShiftState(0.0, config.c0, fan.v_mid, fan.delta_S)
    return state, wave, shift


def rhs(state: GridState, sigma: float, terms=ALL_TERMS,
        left: str = "pinned") -> tuple[np.ndarray, np.ndarray]:
    """``(v_t, u_t)`` in the moving frame; zero at pinned end nodes.

    With an outflow left end, ``v`` there follows the mass equation with
    one-sided second-order differences.
    """
    d = state.dxi
    v, u = state.v, state.u
    vt = np.zeros_like(v)
    ut = np.zeros_like(u)
    du = (u[2:] - u[:-2]) / (2 * d)
    vt[1:-1] = sigma * (v[2:] - v[:-2]) / (2 * d) + du
    acc = sigma * du
    if "pressure" in terms:
        p = 2.0 / v
        acc = acc - (p[2:] - p[:-2]) / (2 * d)
    if "viscosity" in terms:
        acc = acc + flux_divergence(u, v, d)
    if "electric" in terms:
        _, dPhi = electric_force(v, state.phi, d)
        acc = acc + dPhi[1:-1]
    ut[1:-1] = acc
    if left != "pinned":
        fwd = lambda f: (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2 * d)
        vt[0] = sigma * fwd(v) + fwd(u)
    if not (np.all(np.isfinite(vt)) and np.all(np.isfinite(ut))):
        raise SimulationError("non-finite right-hand side", state)
    return vt, ut


def stable_dt(state: GridState, sigma: float, cfl_h: float = 0.4, cfl_p: float = 0.25) -> float:
    vmin = float(np.min(state.v))
    s_max = abs(sigma) + math.sqrt(2.0) / vmin
    d = state.dxi
    return min(cfl_h * d / s_max, cfl_p * d * d * vmin)


@dataclass
class StageEval:
    vt: np.ndarray
    ut: np.ndarray
    Xdot: float
    comp: dict
    mass_source: float


def evaluate(state: GridState, wave: CompositeWave, shift: ShiftState, terms=ALL_TERMS,
             left: str = "pinned") -> StageEval:
    sigma = wave.fan.sigma
    comp = wave.eval(state.t, state.X, state.xi)
    vt, ut = rhs(state, sigma, terms, left)
    s = ShiftState(state.X, shift.c0, shift.v_mid, shift.delta_S)
    xdot = shift_velocity(state.v, comp, sigma, s, state.dxi)
    vtil = state.v - comp["v"]
    util = state.u - comp["u"]
    flux = (sigma * vtil[-1] + util[-1]) - (sigma * vtil[0] + util[0])
    source = flux + xdot * trapezoid(comp["vS_xi"], state.dxi)
    return StageEval(vt, ut, xdot, comp, source)


def _pin_and_solve(state: GridState, wave: CompositeWave, guess, left: str = "pinned") -> None:
    ends = wave.eval(state.t, state.X, state.xi[[0, -1]])
    state.v[-1] = ends["v"][1]
    state.u[-1] = ends["u"][1]
    if left == "pinned":
        state.v[0] = ends["v"][0]
    if left == "outflow-neumann":
        near = wave.eval(state.t, state.X, state.xi[1:3])
        du = state.u[1:3] - near["u"]
        state.u[0] = ends["u"][0] + (4.0 * du[0] - du[1]) / 3.0
    else:
        state.u[0] = ends["u"][0]
    if not np.min(state.v) > 0.0:
        raise SimulationError(f"min(v) = {np.min(state.v):.4g} at t = {state.t:.6g}", state)
    state.phi = solve_potential(state, ends, guess)


def step(state: GridState, wave: CompositeWave, shift: ShiftState, dt: float,
         first: StageEval | None = None, terms=ALL_TERMS, co_shift: bool = True,
         left: str = "pinned"):
    """One Heun step of ``(v, u, X)``; returns the new state and the stage data.

    ``co_shift=False`` freezes X (used for convergence tests on frozen data).
    """
    k1 = evaluate(state, wave, shift, terms, left) if first is None else first
    mid = state.copy()
    mid.t = state.t + dt
    mid.v = state.v + dt * k1.vt
    mid.u = state.u + dt * k1.ut
    if co_shift:
        mid.X = state.X + dt * k1.Xdot
    _pin_and_solve(mid, wave, state.phi, left)
    k2 = evaluate(mid, wave, shift, terms, left)
    new = state.copy()
    new.t = state.t + dt
    new.v = state.v + 0.5 * dt * (k1.vt + k2.vt)
    new.u = state.u + 0.5 * dt * (k1.ut + k2.ut)
    if co_shift:
        new.X = state.X + 0.5 * dt * (k1.Xdot + k2.Xdot)
    new.dt_last = dt
    _pin_and_solve(new, wave, mid.phi, left)
    return new, k1, k2


@dataclass
class RunResult:
    config: RunConfig
    wave: CompositeWave
    reports: list[EnergyReport]
    snapshots: dict[float, dict[str, np.ndarray]]
    final: GridState
    steps: int
    min_v: float
    max_abs_xdot: float
    xdot_history: list[tuple[float, float]] = field(default_factory=list)


def snapshot(state: GridState, comp: dict) -> dict[str, np.ndarray]:
    return {"xi": state.xi.copy(), "v": state.v.copy(), "u": state.u.copy(), "phi": state.phi.copy(),
            "vbar": comp["v"].copy(), "ubar": comp["u"].copy(), "phibar": comp["phi"].copy()}


def run(config: RunConfig, wave: CompositeWave | None = None, progress=None,
        left: str | None = None) -> RunResult:
    """Advance to ``t_final`` emitting a report every ``report_interval``.

    ``left`` overrides ``config.left_boundary``.
    """
    left = config.left_boundary if left is None else left
    if left not in LEFT_BOUNDARIES:
        raise ConfigError(f"left_boundary: unknown treatment {left!r}")
    state, wave, shift = initialize(config, wave)
    sigma = wave.fan.sigma
    d = state.dxi
    reports: list[EnergyReport] = []
    snaps: dict[float, dict] = {}
    snap_times = sorted(float(s) for s in config.snapshots)
    xdot_hist = []
    min_v = float(np.min(state.v))
    max_xdot = 0.0

    n_reports = int(math.floor(config.t_final / config.report_interval + 1e-9))
    targets = [k * config.report_interval for k in range(1, n_reports + 1)]
    if not targets or targets[-1] < config.t_final - 1e-12:
        targets.append(config.t_final)
    marks = sorted(set(targets) | {s for s in snap_times if 0.0 < s <= config.t_final})

    k = evaluate(state, wave, shift, left=left)
    mass0 = trapezoid(state.v - k.comp["v"], d)
    source_acc = 0.0

    def emit(st: GridState, ev: StageEval):
        if any(abs(st.t - s) < 1e-9 for s in snap_times):
            snaps[st.t] = snapshot(st, ev.comp)
        if st.t == 0.0 or any(abs(st.t - r) < 1e-9 for r in targets):
            mass = trapezoid(st.v - ev.comp["v"], d) - mass0 - source_acc
            reports.append(energy_report(st, ev.comp, sigma, ev.Xdot, mass))
            if progress is not None:
                progress(reports[-1])

    emit(state, k)
    steps = 0
    for mark in marks:
        while state.t < mark - 1e-12:
            dt = stable_dt(state, sigma, config.cfl_h, config.cfl_p)
            if state.t + dt > mark - 1e-12:
                dt = mark - state.t
            new, k1, k2 = step(state, wave, shift, dt, first=k, left=left)
            source_acc += 0.5 * dt * (k1.mass_source + k2.mass_source)
            state = new
            steps += 1
            k = evaluate(state, wave, shift, left=left)
            min_v = min(min_v, float(np.min(state.v)))
            max_xdot = max(max_xdot, abs(k.Xdot))
            xdot_hist.append((state.t, k.Xdot))
        state.t = mark
        emit(state, k)
    return RunResult(config, wave, reports, snaps, state, steps, min_v, max_xdot, xdot_hist)
