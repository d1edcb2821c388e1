"""Catalogue of metrics with frames, connections, curvature and constants.

``get_entry(id, **params)`` is the single lookup used by the CLI.
"""
from __future__ import annotations

from ..core import ConfigurationError
from .axisym import (
    PRESETS as AXISYM_PRESETS,
    AxisymSurface,
    Partials,
    Profile2D,
    RadialProfile,
    axisym_entry,
    axisym_ricci,
    bump_profile,
    check_axis_regular,
    even_pair,
    flat_profile,
    hyperbolic_profile,
    odd_pair,
    rcoshz_pair,
    sphere_profile,
)
from .base import CatalogEntry, KillingField, antisymmetric_connection
from .berger import berger_coefficients, berger_entry, berger_frame
from .flat import (
    POINCARE_BALL,
    STEREOGRAPHIC_SPHERE,
    ConformalFactor,
    FlatKind,
    e3_entry,
    flat_explicit,
    flat_explicit_state,
    h3_entry,
    m3_entry,
    s3_entry,
)
from .nil import nil_entry, nil_eta, nil_frame
from .schwarzschild import exterior_to_horizon, horizon_to_exterior, schwarzschild_entry, tortoise

_BUILDERS = {
    "e3": lambda **p: e3_entry(),
    "m3": lambda **p: m3_entry(),
    "s3": lambda **p: s3_entry(),
    "h3": lambda **p: h3_entry(),
    "nil-r": lambda lam=1.0, **p: nil_entry(1, lam),
    "nil-l": lambda lam=1.0, **p: nil_entry(-1, lam),
    "berger": lambda lam=2.0, **p: berger_entry(lam),
    "schw-ext": lambda m=1.0, **p: schwarzschild_entry(m, horizon=False),
    "schw-hor": lambda m=1.0, **p: schwarzschild_entry(m, horizon=True),
    "axisym": lambda profile="flat", require_even=True, **p: axisym_entry(
        profile, require_even=_as_bool(require_even), **p),
}

ENTRY_IDS = tuple(_BUILDERS)


def _as_bool(v) -> bool:
    if isinstance(v, str):
        return v.lower() in ("1", "true", "yes", "on")
    return bool(v)


def get_entry(entry_id: str, **params) -> CatalogEntry:
    """Build a catalogue entry by id; unknown ids or parameters raise ConfigurationError."""
    try:
        build = _BUILDERS[entry_id]
    except KeyError:
        raise ConfigurationError(f"unknown metric {entry_id!r}; known: {', '.join(ENTRY_IDS)}") from None
    try:
        return build(**params)
    except TypeError as err:
        raise ConfigurationError(f"bad parameters for {entry_id}: {err}") from None


__all__ = [
    "CatalogEntry",
    "KillingField",
    "antisymmetric_connection",
    "get_entry",
    "ENTRY_IDS",
    "e3_entry",
    "m3_entry",
    "s3_entry",
    "h3_entry",
    "nil_entry",
    "nil_eta",
    "nil_frame",
    "berger_entry",
    "berger_frame",
    "berger_coefficients",
    "schwarzschild_entry",
    "exterior_to_horizon",
    "horizon_to_exterior",
    "tortoise",
    "axisym_entry",
    "axisym_ricci",
    "AxisymSurface",
    "Partials",
    "Profile2D",
    "RadialProfile",
    "AXISYM_PRESETS",
    "bump_profile",
    "flat_profile",
    "sphere_profile",
    "hyperbolic_profile",
    "rcoshz_pair",
    "even_pair",
    "odd_pair",
    "check_axis_regular",
    "ConformalFactor",
    "STEREOGRAPHIC_SPHERE",
    "POINCARE_BALL",
    "FlatKind",
    "flat_explicit",
    "flat_explicit_state",
]
