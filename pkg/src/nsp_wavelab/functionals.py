"""Relative quantities, the modulated relative functional and dissipation terms."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict, fields

import numpy as np

from nsp_wavelab.poisson import ddx, poisson_residual
from nsp_wavelab.shift import trapezoid, weight


def effective_velocity(v, u, d: float):
    """``h = u - v_xi / v``."""
    v = np.asarray(v, dtype=float)
    return np.asarray(u, dtype=float) - ddx(v, d) / v


def _check(*arrs):
    for a in arrs:
        if np.any(np.asarray(a) <= 0.0):
            raise ValueError("arguments must be positive")


def relative_Q(v, vbar):
    """Relative form of ``Q(v) = -2 ln v``: ``-2 ln(v/vbar) + 2 (v - vbar)/vbar``."""
    _check(v, vbar)
    v = np.asarray(v, dtype=float)
    vbar = np.asarray(vbar, dtype=float)
    return -2.0 * np.log(v / vbar) + 2.0 * (v - vbar) / vbar


def relative_pressure(v, vbar):
    """``p~(v|vbar) = p~(v) - p~(vbar) - p~'(vbar)(v - vbar)`` for ``p~ = 2/v``."""
    _check(v, vbar)
    v = np.asarray(v, dtype=float)
    vbar = np.asarray(vbar, dtype=float)
    return 2.0 / v - 2.0 / vbar + 2.0 * (v - vbar) / vbar**2


def eta_pointwise(W, Wbar, phit_xi, phit_xixi):
    """Modulated relative functional at each node.

    ``W = (v, h, phi)`` and ``Wbar = (vbar, hbar, phibar)``; the potential
    perturbation derivatives are passed in separately.
    """
    v, h, _ = W
    vb, hb, phib = Wbar
    vt = v - vb
    eb = np.exp(-phib)
    return (0.5 * (h - hb) ** 2 + relative_Q(v, vb) - vt * phit_xixi / vb**2
            + eb * phit_xixi**2 / (2 * vb**3) + eb * phit_xi**2 / (2 * vb**2))


def perturbation(state, comp: dict) -> dict:
    """Perturbation fields and their derivatives on the state's grid."""
    d = state.dxi
    vt = state.v - comp["v"]
    ut = state.u - comp["u"]
    pt = state.phi - comp["phi"]
    h = effective_velocity(state.v, state.u, d)
    pt1 = ddx(pt, d)
    pt2 = ddx(pt1, d)
    pt3 = ddx(pt2, d)
    vt1 = ddx(vt, d)
    ut1 = ddx(ut, d)
    return {"v": vt, "u": ut, "phi": pt, "h": h - comp["h"],
            "v_xi": vt1, "v_xixi": ddx(vt1, d), "u_xi": ut1, "u_xixi": ddx(ut1, d),
            "phi_xi": pt1, "phi_xixi": pt2, "phi_xixixi": pt3}


def eta_integral(state, comp: dict, weighted: bool = True, pert=None) -> float:
    pert = perturbation(state, comp) if pert is None else pert
    h = effective_velocity(state.v, state.u, state.dxi)
    eta = eta_pointwise((state.v, h, state.phi), (comp["v"], comp["h"], comp["phi"]),
                        pert["phi_xi"], pert["phi_xixi"])
    if weighted:
        a, _ = weight(comp["vS"], comp["v_mid"], comp["delta_S"])
        eta = a * eta
    return trapezoid(eta, state.dxi)


def equivalence_measure(pert: dict, d: float) -> float:
    """``S = int |h~|^2 + |v~|^2 + |phi~_xi|^2 + |phi~_xixi|^2``."""
    return trapezoid(pert["h"] ** 2 + pert["v"] ** 2 + pert["phi_xi"] ** 2 + pert["phi_xixi"] ** 2, d)


def good_terms(state, comp: dict, sigma: float, pert=None) -> dict[str, float]:
    """``G1, G2, G3, GS, GR, D`` by trapezoid quadrature."""
    d = state.dxi
    pert = perturbation(state, comp) if pert is None else pert
    dp = 2.0 / state.v - 2.0 / comp["v"]
    dS = comp["delta_S"]
    if dS > 0.0:
        g1 = trapezoid(comp["vS_xi"] * (pert["h"] - dp / sigma) ** 2, d) / math.sqrt(dS)
    else:
        g1 = 0.0
    return {
        "G1": g1,
        "G2": trapezoid(pert["phi_xixi"] ** 2, d),
        "G3": trapezoid(pert["phi_xixixi"] ** 2, d),
        "GS": trapezoid(comp["vS_xi"] * dp**2, d),
        "GR": trapezoid(comp["vR_xi"] * pert["v"] ** 2, d),
        "D": trapezoid(ddx(dp, d) ** 2, d),
    }


def pressure_gap_derivative_chain(state, comp: dict):
    """``(p~(v) - p~(vbar))_xi`` by the chain rule with the analytic ``vbar_xi``."""
    return -2.0 * ddx(state.v, state.dxi) / state.v**2 + 2.0 * comp["v_xi"] / comp["v"] ** 2


def _sobolev(f_derivs, d):
    acc = 0.0
    out = []
    for f in f_derivs:
        acc += trapezoid(f**2, d)
        out.append(math.sqrt(acc))
    return out


def norms(state, comp: dict, pert=None) -> dict[str, float]:
    """Discrete L2, Linf, H1, H2 norms of ``(v~, u~)`` and H1..H3 of ``phi~``."""
    d = state.dxi
    p = perturbation(state, comp) if pert is None else pert
    out = {}
    for name in ("v", "u"):
        l2, h1, h2 = _sobolev([p[name], p[f"{name}_xi"], p[f"{name}_xixi"]], d)
        out.update({f"Linf_{name}": float(np.max(np.abs(p[name]))),
                    f"L2_{name}": l2, f"H1_{name}": h1, f"H2_{name}": h2})
    l2, h1, h2, h3 = _sobolev([p["phi"], p["phi_xi"], p["phi_xixi"], p["phi_xixixi"]], d)
    out.update({"Linf_phi": float(np.max(np.abs(p["phi"]))), "L2_phi": l2, "H1_phi": h1,
                "H2_phi": h2, "H3_phi": h3})
    return out


def elliptic_residual(state, comp: dict) -> dict[str, float]:
    """Discrete Poisson residuals of ``(v, phi)`` and of the shifted shock component.

    The first is the solver's own residual; the second carries the O(dxi^2)
    truncation error of sampling the profile on the grid.
    """
    d = state.dxi
    r_full = float(np.max(np.abs(poisson_residual(state.phi, state.v, d))))
    r_shock = float(np.max(np.abs(poisson_residual(comp["phiS"], comp["vS"], d))))
    return {"state": r_full, "shock": r_shock, "max": max(r_full, r_shock)}


@dataclass
class EnergyReport:
    t: float
    X: float
    Xdot: float
    Linf_v: float
    Linf_u: float
    Linf_phi: float
    L2_v: float
    L2_u: float
    H2_v: float
    H2_u: float
    eta_weighted: float
    G1: float
    G2: float
    G3: float
    GS: float
    GR: float
    D: float
    mass_balance_residual: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


def energy_report(state, comp: dict, sigma: float, Xdot: float,
                  mass_balance_residual: float = 0.0) -> EnergyReport:
    pert = perturbation(state, comp)
    n = norms(state, comp, pert)
    g = good_terms(state, comp, sigma, pert)
    return EnergyReport(
        t=state.t, X=state.X, Xdot=Xdot,
        Linf_v=n["Linf_v"], Linf_u=n["Linf_u"], Linf_phi=n["Linf_phi"],
        L2_v=n["L2_v"], L2_u=n["L2_u"], H2_v=n["H2_v"], H2_u=n["H2_u"],
        eta_weighted=eta_integral(state, comp, True, pert), **g,
        mass_balance_residual=mass_balance_residual,
    )


def interaction_norm(comp: dict, d: float) -> float:
    """``|| vS_xi (vR - v_m) ||_L2``: overlap of the shock profile with the rarefaction."""
    return math.sqrt(trapezoid((comp["vS_xi"] * (comp["vR"] - comp["v_mid"])) ** 2, d))
