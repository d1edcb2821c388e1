from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..core import (
    CGState,
    FrameMetric,
    InfeasibleError,
    Signature,
    validate_state,
)
from ..dynamics import make_third_order_rhs

__all__ = ["KillingField", "CatalogEntry", "antisymmetric_connection", "constraint_neutral",
           "DEFAULT_STATE_TOL"]

DEFAULT_STATE_TOL = 1e-9

RHS = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class KillingField:
    """A Killing vector with constant coordinate components."""

    name: str
    components: tuple[float, ...]
    hypersurface_orthogonal: bool = False

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)


@dataclass(frozen=True)
class CatalogEntry:
    """A catalogued metric with its specialised dynamics and constants.

    ``specialized`` and ``constants`` are factories keyed by the curve class
    because several systems carry ``eps`` explicitly.  ``observable`` names
    the scalar whose range measures confinement (``gamma`` on Nil and the
    Berger sphere, ``r`` for axisymmetric planes).
    """

    id: str
    metric: FrameMetric | None
    signature: Signature
    params: dict
    dim: int
    specialized: Callable[[Signature], RHS] | None = None
    constants: Callable[[Signature], dict] | None = None
    killing_fields: dict = field(default_factory=dict)
    observable: tuple[str, Callable[[np.ndarray], float]] | None = None
    blowup_observable: Callable[[np.ndarray], float] | None = None
    closed_forms: dict = field(default_factory=dict)
    flags: tuple[str, ...] = ()
    extras: dict = field(default_factory=dict)

    @property
    def ncoord(self) -> int:
        return self.dim

    @property
    def eta(self) -> np.ndarray:
        if self.metric is not None:
            return self.metric.eta_array
        return np.asarray(self.extras["eta"], dtype=float)

    def rhs(self, sig: Signature | None = None, specialized: bool = True) -> RHS:
        sig = sig or self.signature
        if specialized and self.specialized is not None:
            fn = self.specialized(sig)
            return fn if self.metric is None else constraint_neutral(fn, self.eta, self.ncoord, self.dim)
        if self.metric is None:
            raise ValueError(f"{self.id} has no generic frame metric")
        return make_third_order_rhs(self.metric, sig)

    def constant_functions(self, sig: Signature | None = None) -> dict:
        if self.constants is None:
            return {}
        return self.constants(sig or self.signature)

    def check_initial(self, s: CGState, sig: Signature | None = None, tol: float = DEFAULT_STATE_TOL):
        """Reject initial data that is not a unit velocity with orthogonal acceleration."""
        sig = sig or self.signature
        if self.metric is not None:
            rep = validate_state(self.metric, s, sig, tol)
            self.metric.chart.validate(s.x)
        else:
            norm = self.extras["norm"](s.to_vector())
            orth = self.extras["orth"](s.to_vector())
            from ..core import StateReport
            rep = StateReport(abs(norm - sig.epsilon), abs(orth), tol)
        if not rep.passed:
            raise InfeasibleError(
                f"initial data invalid for {self.id}: |g(u,u)-eps|={rep.norm_error:.3g}, "
                f"|g(u,a)|={rep.orthogonality_error:.3g} (tol {tol:g})")
        return rep


def constraint_neutral(rhs: RHS, eta, ncoord: int, dim: int) -> RHS:
    """Adjust ``rhs`` along ``u`` so that ``g(u,a)`` is conserved exactly.

    Componentwise systems substitute ``g(u,u) = eps`` in places, which
    leaves the constraint set invariant but possibly unstable.  The
    correction vanishes on the constraint set, so solutions there are
    unchanged; off it ``g(u,u) - eps`` and ``g(u,a)`` stay put instead of
    growing.
    """
    eta = np.asarray(eta, dtype=float)
    iu, ia = ncoord, ncoord + dim

    def wrapped(t, y):
        f = np.array(rhs(t, y), dtype=float)
        u, a = y[iu:ia], y[ia:ia + dim]
        nn = float(np.dot(eta, u * u))
        if nn == 0:
            return f
        ua = float(np.dot(eta, u * a))
        udot = f[iu:ia]
        udot -= u * (float(np.dot(eta, u * udot)) - ua) / nn
        adot = f[ia:ia + dim]
        adot -= u * (float(np.dot(eta, udot * a)) + float(np.dot(eta, u * adot))) / nn
        return f

    return wrapped


def antisymmetric_connection(dim: int, eta, entries: dict) -> Callable[[np.ndarray], np.ndarray]:
    """Build ``gamma(x)`` from the independent one-forms ``omega^i_j``.

    ``entries[(i, j)]`` maps ``x`` to the frame components ``omega^i_j(e_k)``
    for ``i < j``; the partner ``omega^j_i`` follows from antisymmetry of
    ``omega_ij = eta_i omega^i_j``, so the result is metric compatible by
    construction.
    """
    eta = np.asarray(eta, dtype=float)

    def gamma(x):
        g = np.zeros((dim, dim, dim))
        for (i, j), fn in entries.items():
            row = np.asarray(fn(x), dtype=float)
            g[i, j, :] = row
            g[j, i, :] = -eta[i] * row / eta[j]
        return g

    return gamma
