"""Weight function and shift ODE of the a-contraction method."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nsp_wavelab.thermo import modified_pressure


def shift_constant(c0: float, v_mid: float) -> float:
    """``M = 5 sqrt(2) c0 / (8 v_m^2)``."""
    return 5.0 * math.sqrt(2.0) * c0 / (8.0 * v_mid**2)


def shift_constant_general(c0: float, v_mid: float) -> float:
    """``M = 5 c0 sigma_m^4 alpha_m / 8`` with ``sigma_m = sqrt(-p~'(v_m))``."""
    sigma_m = math.sqrt(2.0) / v_mid
    alpha_m = 1.0 / (sigma_m * modified_pressure(v_mid))
    return 5.0 * c0 * sigma_m**4 * alpha_m / 8.0


@dataclass
class ShiftState:
    X: float
    c0: float
    v_mid: float
    delta_S: float

    @property
    def M(self) -> float:
        return shift_constant(self.c0, self.v_mid)

    @property
    def active(self) -> bool:
        return self.delta_S > 0.0


def weight(vS, v_mid: float, delta_S: float):
    """``a = 1 + (p~(v_m) - p~(vS)) / sqrt(delta_S)`` from shifted profile values.

    Returns ``(a, active)``; a zero-amplitude shock gives ``a = 1`` and
    ``active = False``.
    """
    vS = np.asarray(vS, dtype=float)
    if delta_S <= 0.0:
        return np.ones_like(vS), False
    return 1.0 + (2.0 / v_mid - 2.0 / vS) / math.sqrt(delta_S), True


def weight_derivative(vS, vS_xi, delta_S: float):
    """``a_xi = 2 vS_xi / (sqrt(delta_S) vS^2)``."""
    if delta_S <= 0.0:
        return np.zeros_like(np.asarray(vS, dtype=float))
    return 2.0 * vS_xi / (math.sqrt(delta_S) * vS**2)


def weight_bounds(v_mid: float, delta_S: float) -> tuple[float, float]:
    return 1.0, 1.0 + 2.0 * math.sqrt(delta_S) / v_mid**2


def trapezoid(f, d: float) -> float:
    return float(d * (np.sum(f) - 0.5 * (f[0] + f[-1])))


def shift_velocity(v, comp: dict, sigma: float, shift: ShiftState, d: float) -> float:
    """Evaluate the shift ODE right-hand side on a grid.

    ``comp`` holds the composite wave on the same grid: ``v`` (composite),
    ``vS``, ``vS_xi``, ``hS_xi`` (shifted shock profile).
    """
    if not shift.active:
        return 0.0
    a, _ = weight(comp["vS"], shift.v_mid, shift.delta_S)
    dp = 2.0 / v - 2.0 / comp["v"]
    pS_xi = -2.0 * comp["vS_xi"] / comp["vS"] ** 2
    first = trapezoid(a * comp["hS_xi"] * dp / sigma, d)
    second = trapezoid(a * pS_xi * (v - comp["v"]), d)
    return -shift.M / shift.delta_S * (first - second)


def shift_rhs(state, wave, shift: ShiftState) -> float:
    """``Xdot`` for a grid state against a composite wave at the state's time and shift."""
    comp = wave.eval(state.t, state.X, state.xi)
    return shift_velocity(state.v, comp, wave.fan.sigma, shift, state.dxi)
