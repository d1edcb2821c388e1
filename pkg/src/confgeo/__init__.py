"""Conformal geodesics on three- and four-dimensional metrics.

Integrators for the conformal-geodesic equations in frame form, a
catalogue of metrics (Nil, Berger sphere, Schwarzschild, axisymmetric
surfaces, conformally flat spaces), quadrature reductions for the
integrable cases and orbit diagnostics.
"""
from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all

__version__ = "0.1.0"
__all__ = list(_core_all) + ["__version__"]
