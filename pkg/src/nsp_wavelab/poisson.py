"""Damped Newton solver for ``-(phi_xi / v)_xi = 1 - v exp(phi)`` with Dirichlet ends."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded


class PoissonNonconvergence(RuntimeError):
    pass


@dataclass
class PoissonProblem:
    xi: np.ndarray
    v: np.ndarray
    phi_left: float
    phi_right: float
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    source: np.ndarray | None = None   # added to the right-hand side 1 - v e^phi

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.xi.shape != self.v.shape or self.xi.ndim != 1 or len(self.xi) < 3:
            raise ValueError("xi and v must be 1D arrays of equal length >= 3")
        if not np.min(self.v) > 0.0:
            raise ValueError(f"v must be positive, min(v) = {np.min(self.v)!r}")
        d = np.diff(self.xi)
        if np.max(np.abs(d - d[0])) > 1e-9 * abs(d[0]):
            raise ValueError("grid must be uniform")

    @property
    def dxi(self) -> float:
        return float(self.xi[1] - self.xi[0])


@dataclass
class PoissonStats:
    iterations: int
    residual: float
    history: list[float]
    halvings: int


def face_inverse(v: np.ndarray) -> np.ndarray:
    """Arithmetic mean of ``1/v`` on the cell faces."""
    w = 1.0 / v
    return 0.5 * (w[1:] + w[:-1])


def flux_divergence(f: np.ndarray, v: np.ndarray, d: float) -> np.ndarray:
    """``D(f_xi / v)`` at interior nodes with face-averaged ``1/v``."""
    flux = (f[1:] - f[:-1]) / d * face_inverse(v)
    return (flux[1:] - flux[:-1]) / d


def poisson_residual(phi: np.ndarray, v: np.ndarray, d: float, source=None) -> np.ndarray:
    """Interior residual of ``-D(phi_xi/v) - 1 + v e^phi - source``."""
    r = -flux_divergence(phi, v, d) - 1.0 + v[1:-1] * np.exp(phi[1:-1])
    if source is not None:
        r -= source[1:-1]
    return r


def solve_phi(problem: PoissonProblem, initial_guess=None) -> tuple[np.ndarray, PoissonStats]:
    """Newton iteration with the exact SPD tridiagonal Jacobian.

    A step is halved until the max-norm residual decreases; 40 halvings
    without decrease is a stagnation error.
    """
    v = problem.v
    d = problem.dxi
    if initial_guess is None:
        phi = -np.log(v)
    else:
        phi = np.array(initial_guess, dtype=float, copy=True)
        if not np.all(np.isfinite(phi)):
            raise ValueError("initial guess must be finite")
    phi[0] = problem.phi_left
    phi[-1] = problem.phi_right
    a = face_inverse(v) / d**2
    off = -a[1:-1]
    res = poisson_residual(phi, v, d, problem.source)
    rnorm = float(np.max(np.abs(res)))
    history = [rnorm]
    halvings = 0
    it = 0
    while rnorm >= problem.newton_tol:
        if it >= problem.newton_max_iter:
            raise PoissonNonconvergence(
                f"Newton iteration cap {problem.newton_max_iter} reached, residual {rnorm:.3e}")
        it += 1
        ab = np.empty((2, len(res)))
        ab[1] = a[1:] + a[:-1] + v[1:-1] * np.exp(phi[1:-1])
        ab[0, 1:] = off
        ab[0, 0] = 0.0
        delta = solveh_banded(ab, -res, check_finite=False)
        lam = 1.0
        for _ in range(41):
            trial = phi.copy()
            trial[1:-1] += lam * delta
            tres = poisson_residual(trial, v, d, problem.source)
            tnorm = float(np.max(np.abs(tres)))
            if tnorm < rnorm:
                break
            lam *= 0.5
            halvings += 1
        else:
            raise PoissonNonconvergence(
                f"Newton stagnated after 40 halvings at residual {rnorm:.3e}")
        phi, res, rnorm = trial, tres, tnorm
        history.append(rnorm)
    return phi, PoissonStats(it, rnorm, history, halvings)


def ddx(f: np.ndarray, d: float) -> np.ndarray:
    """Centred difference, second-order one-sided at the ends."""
    return np.gradient(f, d, edge_order=2)


def electric_force(v: np.ndarray, phi: np.ndarray, d: float) -> tuple[np.ndarray, np.ndarray]:
    """``Phi = (phi_xi/v)^2/2 - (phi_xi/v)_xi / v`` and its xi-derivative."""
    phi_x = ddx(phi, d)
    g = phi_x / v
    gx = np.empty_like(g)
    gx[1:-1] = flux_divergence(phi, v, d)
    # ends: one-sided second-order phi_xx, then the product rule
    v_x = ddx(v, d)
    for i, s in ((0, 1), (-1, -1)):
        pxx = (2 * phi[i] - 5 * phi[i + s] + 4 * phi[i + 2 * s] - phi[i + 3 * s]) / d**2
        gx[i] = pxx / v[i] - phi_x[i] * v_x[i] / v[i] ** 2
    Phi = 0.5 * g * g - gx / v
    return Phi, ddx(Phi, d)


def manufactured_study(n_levels: int = 4, n0: int = 80, L: float = 10.0) -> list[dict]:
    """Grid-convergence study against a smooth manufactured solution.

    ``phi* = 0.3 sin(pi x / L) exp(-x^2/8) - ln v*`` and
    ``v* = 1 + 0.2 exp(-x^2/4)`` on ``[-L, L]``; the discrete problem carries
    the analytic residual of ``(v*, phi*)`` as a source.
    """
    import sympy as sp

    x = sp.symbols("x")
    vs = 1 + sp.Rational(1, 5) * sp.exp(-x**2 / 4)
    ps = sp.Rational(3, 10) * sp.sin(sp.pi * x / L) * sp.exp(-x**2 / 8) - sp.log(vs)
    src = -sp.diff(sp.diff(ps, x) / vs, x) - 1 + vs * sp.exp(ps)
    fv = sp.lambdify(x, vs, "numpy")
    fp = sp.lambdify(x, ps, "numpy")
    fs = sp.lambdify(x, src, "numpy")
    rows = []
    prev = None
    for k in range(n_levels):
        n = n0 * 2**k
        xi = np.linspace(-L, L, n + 1)
        v = fv(xi)
        exact = fp(xi)
        prob = PoissonProblem(xi, v, float(exact[0]), float(exact[-1]),
                              newton_tol=1e-11, source=fs(xi))
        phi, stats = solve_phi(prob)
        err = float(np.max(np.abs(phi - exact)))
        order = float(np.log2(prev / err)) if prev else float("nan")
        rows.append({"dxi": prob.dxi, "error": err, "observed_order": order,
                     "newton_iterations": stats.iterations})
        prev = err
    return rows
