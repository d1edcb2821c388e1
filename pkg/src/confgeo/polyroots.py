"""Real roots of low-degree polynomials with multiplicities.

Roots are isolated through the critical points: between consecutive
critical points the polynomial is monotone, so each sign change brackets
exactly one simple root, polished with Brent's method.  A critical point
where the polynomial itself vanishes (to a scaled tolerance) is a multiple
root whose multiplicity is one more than its multiplicity for the
derivative.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = ["Root", "real_roots", "cauchy_bound", "ferrari_roots", "polyval"]


@dataclass(frozen=True)
class Root:
    value: float
    multiplicity: int = 1


def polyval(coeffs, x: float) -> float:
    """Horner evaluation, highest degree first."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _trim(coeffs) -> list[float]:
    c = [float(v) for v in coeffs]
    while len(c) > 1 and c[0] == 0.0:
        c.pop(0)
    return c


def _derivative(c: list[float]) -> list[float]:
    n = len(c) - 1
    return [c[i] * (n - i) for i in range(n)]


def _scale(c: list[float], x: float) -> float:
    # floored at |x| = 1 so a root at the origin is measured against the coefficients
    ax = max(abs(x), 1.0)
    return sum(abs(v) * ax ** (len(c) - 1 - i) for i, v in enumerate(c))


def cauchy_bound(coeffs) -> float:
    """All roots satisfy ``|x| <= 1 + max |c_i / c_0|``."""
    c = _trim(coeffs)
    if len(c) == 1:
        return 1.0
    return 1.0 + max(abs(v / c[0]) for v in c[1:])


def real_roots(coeffs, lo: float = -np.inf, hi: float = np.inf, tol: float = 1e-12,
               xtol: float = 1e-15) -> list[Root]:
    """Real roots in ``[lo, hi]`` sorted ascending, with multiplicities.

    ``tol`` is relative to the sum of term magnitudes at a critical point
    (with ``|x|`` floored at 1) and decides when a near-tangency counts as
    a multiple root.

    >>> [(round(r.value, 12), r.multiplicity) for r in real_roots([-1, 0, 0.75, 0, 0])]
    [(-0.866025403784, 1), (0.0, 2), (0.866025403784, 1)]
    """
    c = _trim(coeffs)
    if len(c) == 1:
        if c[0] == 0.0:
            raise ValueError("zero polynomial has every number as a root")
        return []
    bound = cauchy_bound(c)
    lo_, hi_ = max(lo, -bound), min(hi, bound)
    if lo_ > hi_:
        return []
    return [r for r in _roots(c, lo_, hi_, tol, xtol) if lo <= r.value <= hi]


def _roots(c: list[float], lo: float, hi: float, tol: float, xtol: float) -> list[Root]:
    if len(c) == 2:
        x = -c[1] / c[0]
        return [Root(x, 1)] if lo <= x <= hi else []

    crit = _roots(_derivative(c), lo, hi, tol, xtol)
    found: list[Root] = []
    knots: list[tuple[float, float, bool]] = []  # (x, p(x), is_root)
    for cp in crit:
        val = polyval(c, cp.value)
        if abs(val) <= tol * _scale(c, cp.value):
            found.append(Root(cp.value, cp.multiplicity + 1))
            knots.append((cp.value, 0.0, True))
        else:
            knots.append((cp.value, val, False))
    ends = [(lo, polyval(c, lo), False)] + knots + [(hi, polyval(c, hi), False)]
    for (x0, p0, r0), (x1, p1, r1) in zip(ends[:-1], ends[1:]):
        if r0 or r1 or x1 <= x0:
            continue
        if p0 == 0.0:
            if x0 == lo:
                found.append(Root(x0, 1))
            continue
        if p1 == 0.0:
            found.append(Root(x1, 1))
            continue
        if p0 * p1 < 0:
            x = brentq(lambda s: polyval(c, s), x0, x1, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=1000)
            found.append(Root(x, 1))
    found.sort(key=lambda r: r.value)
    # merge duplicates produced when a root sits exactly on an interval end
    out: list[Root] = []
    for r in found:
        if out and abs(r.value - out[-1].value) <= 10 * xtol * max(1.0, abs(r.value)):
            if r.multiplicity > out[-1].multiplicity:
                out[-1] = r
            continue
        out.append(r)
    return out


def ferrari_roots(coeffs) -> list[complex]:
    """All four roots of a quartic by Ferrari's resolvent cubic.

    Intended as an independent cross-check; it loses accuracy near
    multiple roots.
    """
    a, b, c, d, e = (complex(v) for v in coeffs)
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    b, c, d, e = b / a, c / a, d / a, e / a
    # depressed quartic y^4 + p y^2 + q y + r with x = y - b/4
    p = c - 3 * b * b / 8
    q = d - b * c / 2 + b**3 / 8
    r = e - b * d / 4 + b * b * c / 16 - 3 * b**4 / 256
    shift = -b / 4
    if abs(q) < 1e-14:
        # biquadratic
        disc = cmath.sqrt(p * p - 4 * r)
        ys = []
        for z in ((-p + disc) / 2, (-p - disc) / 2):
            s = cmath.sqrt(z)
            ys += [s, -s]
        return [y + shift for y in ys]
    # resolvent cubic m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0, need m != 0
    m = _cubic_root(1.0, p, p * p / 4 - r, -q * q / 8)
    s = cmath.sqrt(2 * m)
    ys = []
    for sign in (1, -1):
        t = -(2 * p + 2 * m + sign * 2 * q / s)
        root = cmath.sqrt(t)
        ys += [(sign * s + root) / 2, (sign * s - root) / 2]
    return [y + shift for y in ys]


def _cubic_root(a, b, c, d) -> complex:
    """One root of a cubic (Cardano), choosing the branch with largest modulus."""
    b, c, d = b / a, c / a, d / a
    p = c - b * b / 3
    q = 2 * b**3 / 27 - b * c / 3 + d
    disc = cmath.sqrt(q * q / 4 + p**3 / 27)
    u3 = -q / 2 + disc
    if abs(u3) < abs(-q / 2 - disc):
        u3 = -q / 2 - disc
    if u3 == 0:
        return -b / 3
    u = u3 ** (1 / 3)
    best = None
    for k in range(3):
        uk = u * cmath.exp(2j * cmath.pi * k / 3)
        y = uk - p / (3 * uk)
        x = y - b / 3
        if best is None or abs(x) > abs(best):
            best = x
    return best
