"""Shock/rarefaction composite waves for the isothermal Navier-Stokes-Poisson system."""

from nsp_wavelab.thermo import RiemannFan, solve_riemann

__version__ = "0.1.0"

__all__ = ["RiemannFan", "solve_riemann", "__version__"]
