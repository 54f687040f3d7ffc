"""Pressure laws, wave curves and the rarefaction/shock Riemann fan.

All constants are normalised (K = nu = lambda = 1), so the ion pressure is
``p(v) = 1/v`` and the quasi-neutral pressure is ``p~(v) = 2/v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

SQRT2 = math.sqrt(2.0)


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a formula."""


class NotOnCurveError(ValueError):
    """Raised when states violate the Rankine-Hugoniot relations."""


class GammaMembershipError(ValueError):
    """Raised when the right state is not between the R1 and S2 curves."""


def _check_positive(v: float, name: str = "v") -> None:
    if not v > 0.0:
        raise DomainError(f"{name} must be positive, got {v!r}")


def pressure(v: float) -> float:
    _check_positive(v)
    return 1.0 / v


def modified_pressure(v: float) -> float:
    """Quasi-neutral pressure ``p(v) + 1/v``."""
    _check_positive(v)
    return 2.0 / v


def modified_pressure_prime(v: float) -> float:
    _check_positive(v)
    return -2.0 / (v * v)


def modified_pressure_second(v: float) -> float:
    _check_positive(v)
    return 4.0 / (v * v * v)


def eigenvalues(v: float) -> tuple[float, float]:
    """Characteristic speeds ``(lambda1, lambda2) = (-sqrt2/v, sqrt2/v)``."""
    _check_positive(v)
    c = SQRT2 / v
    return -c, c


def lambda1(v: float) -> float:
    return eigenvalues(v)[0]


def lambda2(v: float) -> float:
    return eigenvalues(v)[1]


def lambda1_inverse(w: float) -> float:
    """Specific volume whose 1-characteristic speed is ``w < 0``."""
    if not w < 0.0:
        raise DomainError(f"lambda1 is negative; cannot invert w={w!r}")
    return -SQRT2 / w


def r1_velocity(v_minus: float, u_minus: float, v: float) -> float:
    """Velocity on the 1-rarefaction curve through ``(v_minus, u_minus)``."""
    _check_positive(v_minus, "v_minus")
    if v < v_minus:
        raise DomainError(f"R1 is defined for v >= v_minus ({v!r} < {v_minus!r})")
    return u_minus + SQRT2 * math.log(v / v_minus)


def s2_velocity(v_mid: float, u_mid: float, v: float) -> float:
    """Velocity on the 2-shock curve through ``(v_mid, u_mid)``."""
    _check_positive(v_mid, "v_mid")
    if v < v_mid:
        raise DomainError(f"S2 is defined for v >= v_mid ({v!r} < {v_mid!r})")
    jump = (v - v_mid) * (modified_pressure(v_mid) - modified_pressure(v))
    return u_mid - math.sqrt(max(jump, 0.0))


def rh_residuals(v_mid, u_mid, v_plus, u_plus, sigma) -> tuple[float, float]:
    r_mass = -sigma * (v_plus - v_mid) - (u_plus - u_mid)
    r_mom = -sigma * (u_plus - u_mid) + (modified_pressure(v_plus) - modified_pressure(v_mid))
    return r_mass, r_mom


def shock_speed(v_mid: float, u_mid: float, v_plus: float, u_plus: float,
                tol: float = 1e-8) -> float:
    """Rankine-Hugoniot speed of the 2-shock joining mid and plus states.

    Both jump relations and the Lax inequality are checked; a zero-amplitude
    shock returns the characteristic speed ``lambda2(v_mid)``.
    """
    _check_positive(v_mid, "v_mid")
    _check_positive(v_plus, "v_plus")
    dv = v_plus - v_mid
    if dv == 0.0:
        if abs(u_plus - u_mid) > tol:
            raise NotOnCurveError("zero volume jump with nonzero velocity jump")
        return lambda2(v_mid)
    sigma = -(u_plus - u_mid) / dv
    r_mass, r_mom = rh_residuals(v_mid, u_mid, v_plus, u_plus, sigma)
    if abs(r_mom) > tol:
        raise NotOnCurveError(
            f"second Rankine-Hugoniot relation violated: residual {r_mom:.3e} > {tol:.1e}")
    if not lambda2(v_plus) < sigma < lambda2(v_mid):
        raise NotOnCurveError(
            f"Lax condition fails: lambda2(v+)={lambda2(v_plus):.6f}, sigma={sigma:.6f}, "
            f"lambda2(vm)={lambda2(v_mid):.6f}")
    return sigma


@dataclass(frozen=True)
class GammaCheck:
    inside: bool
    reason: str

    def __bool__(self) -> bool:
        return self.inside


def gamma_membership(v_minus: float, u_minus: float, v_plus: float, u_plus: float,
                     delta0: float) -> GammaCheck:
    """Is ``(v_plus, u_plus)`` strictly between S2 and R1 with amplitude below delta0?"""
    if not (v_minus > 0 and v_plus > 0):
        return GammaCheck(False, "specific volumes must be positive")
    dv = v_plus - v_minus
    if not 0.0 < dv:
        return GammaCheck(False, f"amplitude v+ - v- = {dv:.6g} is not positive")
    if not dv < delta0:
        return GammaCheck(False, f"amplitude v+ - v- = {dv:.6g} is not below delta0 = {delta0:.6g}")
    du = u_plus - u_minus
    lower = -math.sqrt(dv * (modified_pressure(v_minus) - modified_pressure(v_plus)))
    upper = SQRT2 * math.log(v_plus / v_minus)
    if not lower < du:
        return GammaCheck(False, f"u+ - u- = {du:.6g} is not above the S2 bound {lower:.6g}")
    if not du < upper:
        return GammaCheck(False, f"u+ - u- = {du:.6g} is not below the R1 bound {upper:.6g}")
    return GammaCheck(True, "inside")


@dataclass(frozen=True)
class RiemannFan:
    v_minus: float
    u_minus: float
    v_mid: float
    u_mid: float
    v_plus: float
    u_plus: float
    sigma: float
    delta_R: float
    delta_S: float
    phi_minus: float
    phi_mid: float
    phi_plus: float

    @property
    def pure_shock(self) -> bool:
        return self.delta_R == 0.0

    @property
    def pure_rarefaction(self) -> bool:
        return self.delta_S == 0.0

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def _composed_velocity(v_minus, u_minus, v_plus, v_mid) -> float:
    return s2_velocity(v_mid, r1_velocity(v_minus, u_minus, v_mid), v_plus)


def _composed_slope(v_minus, u_minus, v_plus, v_mid) -> float:
    # d/dv_mid of the R1-then-S2 composition; infinite at v_mid = v_plus
    a = v_plus - v_mid
    jump = 2.0 / v_mid - 2.0 / v_plus
    if a <= 0.0:
        return math.inf
    dj = -jump - a * 2.0 / (v_mid * v_mid)
    return SQRT2 / v_mid - dj / (2.0 * math.sqrt(a * jump))


def solve_riemann(v_minus: float, u_minus: float, v_plus: float, u_plus: float,
                  tol: float = 1e-12) -> RiemannFan:
    """Intermediate state of the 1-rarefaction/2-shock Riemann solution.

    The right state must lie in the closure of the region between S2 and R1;
    the boundary cases give zero-amplitude rarefaction or shock.
    """
    _check_positive(v_minus, "v_minus")
    _check_positive(v_plus, "v_plus")
    if not v_plus > v_minus:
        raise GammaMembershipError(
            f"v_plus - v_minus = {v_plus - v_minus:.6g} must be positive (Gamma region)")
    slack = 1e3 * tol
    g_lo = _composed_velocity(v_minus, u_minus, v_plus, v_minus) - u_plus
    g_hi = _composed_velocity(v_minus, u_minus, v_plus, v_plus) - u_plus
    if g_lo > slack:
        raise GammaMembershipError(
            f"u_plus lies below the S2 curve by {g_lo:.3e} (Gamma lower inequality)")
    if g_hi < -slack:
        raise GammaMembershipError(
            f"u_plus lies above the R1 curve by {-g_hi:.3e} (Gamma upper inequality)")

    if abs(g_lo) <= tol:
        v_mid = v_minus
    elif abs(g_hi) <= tol:
        v_mid = v_plus
    else:
        lo, hi = v_minus, v_plus
        while hi - lo > 1e-6 * (v_plus - v_minus):
            mid = 0.5 * (lo + hi)
            if _composed_velocity(v_minus, u_minus, v_plus, mid) - u_plus < 0.0:
                lo = mid
            else:
                hi = mid
        v_mid = 0.5 * (lo + hi)
        for _ in range(50):
            g = _composed_velocity(v_minus, u_minus, v_plus, v_mid) - u_plus
            if g < 0.0:
                lo = v_mid
            else:
                hi = v_mid
            step = g / _composed_slope(v_minus, u_minus, v_plus, v_mid)
            cand = v_mid - step
            if not lo <= cand <= hi:
                cand = 0.5 * (lo + hi)
            if abs(cand - v_mid) <= 1e-15 * v_mid or hi - lo <= 1e-15 * v_mid:
                v_mid = cand
                break
            v_mid = cand

    u_mid = r1_velocity(v_minus, u_minus, v_mid)
    delta_S = v_plus - v_mid
    if delta_S > 0.0:
        sigma = -(u_plus - u_mid) / delta_S
    else:
        sigma = lambda2(v_plus)
    return RiemannFan(
        v_minus=v_minus, u_minus=u_minus, v_mid=v_mid, u_mid=u_mid,
        v_plus=v_plus, u_plus=u_plus, sigma=sigma,
        delta_R=v_mid - v_minus, delta_S=delta_S,
        phi_minus=-math.log(v_minus), phi_mid=-math.log(v_mid), phi_plus=-math.log(v_plus),
    )


def fan_from_mid(v_minus: float, u_minus: float, v_mid: float, v_plus: float) -> RiemannFan:
    """Build a fan by forward composition along R1 then S2."""
    u_mid = r1_velocity(v_minus, u_minus, v_mid)
    u_plus = s2_velocity(v_mid, u_mid, v_plus)
    return solve_riemann(v_minus, u_minus, v_plus, u_plus)
