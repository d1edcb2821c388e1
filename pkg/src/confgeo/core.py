"""Shared geometric state types and frame algebra.

Every metric in the package is presented through an orthonormal (or
pseudo-orthonormal) frame ``e_i`` over a coordinate chart.  Vector and
one-form components are always frame components unless stated otherwise.

Connection coefficients are stored as ``gamma[i, j, k] = omega^i_j(e_k)``,
so that for a vector field ``w`` along a curve with unit tangent ``u``::

    (nabla_u w)^i = dw^i/dt + gamma[i, j, k] w^j u^k
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ConfGeoError",
    "DomainError",
    "InfeasibleError",
    "ConfigurationError",
    "SingularParametrizationError",
    "InsufficientDataError",
    "SignatureKind",
    "Signature",
    "RIEMANNIAN",
    "LORENTZ_SPACELIKE",
    "LORENTZ_TIMELIKE",
    "Chart",
    "FrameMetric",
    "CGState",
    "VBState",
    "EventKind",
    "Event",
    "Trajectory",
    "frame_norm",
    "frame_dot",
    "validate_state",
    "StateReport",
]


class ConfGeoError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ConfGeoError):
    """A state left the validity domain of its coordinate chart.

    ``kind`` distinguishes a chart artifact (``"frame_singularity"``) from a
    genuine boundary or curvature singularity (``"domain_exit"``).
    """

    def __init__(self, message: str, x=None, kind: str = "domain_exit"):
        super().__init__(message)
        self.x = None if x is None else np.array(x, dtype=float)
        self.kind = kind


class InfeasibleError(ConfGeoError):
    """Initial data inconsistent with the requested reduction."""


class ConfigurationError(ConfGeoError):
    """Parameters violate a documented precondition."""


class SingularParametrizationError(ConfGeoError):
    """A rational expression hits a genuine pole of the chosen parametrization."""


class InsufficientDataError(ConfGeoError):
    """A trajectory is too short for the requested analysis."""


class SignatureKind(str, enum.Enum):
    RIEMANNIAN = "riemannian"
    LORENTZ_SPACELIKE = "lorentz-spacelike"
    LORENTZ_TIMELIKE = "lorentz-timelike"


@dataclass(frozen=True)
class Signature:
    """Curve class: the sign ``epsilon = g(u, u)`` of the unit tangent."""

    kind: SignatureKind

    @property
    def epsilon(self) -> int:
        return -1 if self.kind is SignatureKind.LORENTZ_TIMELIKE else 1

    @property
    def lorentzian(self) -> bool:
        return self.kind is not SignatureKind.RIEMANNIAN

    @classmethod
    def from_epsilon(cls, epsilon: int, lorentzian: bool) -> "Signature":
        if not lorentzian:
            if epsilon != 1:
                raise ConfigurationError("Riemannian curves have epsilon = +1")
            return RIEMANNIAN
        return LORENTZ_TIMELIKE if epsilon < 0 else LORENTZ_SPACELIKE


RIEMANNIAN = Signature(SignatureKind.RIEMANNIAN)
LORENTZ_SPACELIKE = Signature(SignatureKind.LORENTZ_SPACELIKE)
LORENTZ_TIMELIKE = Signature(SignatureKind.LORENTZ_TIMELIKE)


def frame_norm(eta: Sequence[float], w: Sequence[float]) -> float:
    """Return ``sum_i eta_i (w^i)^2``."""
    eta = np.asarray(eta, dtype=float)
    w = np.asarray(w, dtype=float)
    if eta.shape != w.shape:
        raise ValueError(f"dimension mismatch: eta {eta.shape} vs w {w.shape}")
    return float(np.dot(eta, w * w))


def frame_dot(eta: Sequence[float], w: Sequence[float], z: Sequence[float]) -> float:
    """Return ``sum_i eta_i w^i z^i``."""
    eta = np.asarray(eta, dtype=float)
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    if not (eta.shape == w.shape == z.shape):
        raise ValueError("dimension mismatch")
    return float(np.dot(eta, w * z))


@dataclass(frozen=True)
class Chart:
    """Coordinate names plus a domain predicate.

    ``check`` raises :class:`DomainError` when ``x`` is outside the chart;
    the default accepts every point.
    """

    names: tuple[str, ...]
    check: Callable[[np.ndarray], None] | None = None
    description: str = ""

    def validate(self, x) -> None:
        if self.check is not None:
            self.check(np.asarray(x, dtype=float))

    def contains(self, x) -> bool:
        try:
            self.validate(x)
        except DomainError:
            return False
        return True


@dataclass(frozen=True)
class FrameMetric:
    """A metric given by a frame over a chart.

    Parameters
    ----------
    dim
        Dimension, 3 or 4.
    eta
        Diagonal frame metric entries (each +1 or -1).
    gamma
        ``gamma(x)`` returns the ``(dim, dim, dim)`` array of connection
        coefficients ``omega^i_j(e_k)``.
    ricci
        ``ricci(x)`` returns the covariant frame Ricci components ``R_ij``.
    frame
        ``frame(x)`` returns the ``(dim, dim)`` matrix whose column ``i``
        holds the coordinate components of ``e_i``.
    chart
        Coordinate names and validity domain.
    """

    dim: int
    eta: tuple[float, ...]
    gamma: Callable[[np.ndarray], np.ndarray]
    ricci: Callable[[np.ndarray], np.ndarray]
    frame: Callable[[np.ndarray], np.ndarray]
    chart: Chart
    name: str = ""

    def __post_init__(self):
        if self.dim not in (3, 4):
            raise ConfigurationError("only dimensions 3 and 4 are supported")
        if len(self.eta) != self.dim or any(abs(abs(e) - 1) > 0 for e in self.eta):
            raise ConfigurationError("eta must hold dim entries of +/-1")

    @property
    def eta_array(self) -> np.ndarray:
        return np.asarray(self.eta, dtype=float)

    @property
    def lorentzian(self) -> bool:
        return any(e < 0 for e in self.eta)

    def coord_map(self, x, u) -> np.ndarray:
        """Frame velocity components to coordinate derivatives."""
        return self.frame(np.asarray(x, dtype=float)) @ np.asarray(u, dtype=float)

    def coframe(self, x) -> np.ndarray:
        """Matrix ``theta[i, mu]`` with ``theta^i = theta[i, mu] dx^mu``."""
        return np.linalg.inv(self.frame(np.asarray(x, dtype=float)))

    def scalar_curvature(self, x) -> float:
        ric = self.ricci(np.asarray(x, dtype=float))
        return float(np.sum(np.diag(ric) / self.eta_array))

    def schouten(self, x) -> np.ndarray:
        """``L_ij = (R_ij - R eta_ij / (2(n-1))) / (n-2)``."""
        x = np.asarray(x, dtype=float)
        n = self.dim
        ric = np.asarray(self.ricci(x), dtype=float)
        scal = float(np.sum(np.diag(ric) / self.eta_array))
        return (ric - scal * np.diag(self.eta_array) / (2.0 * (n - 1))) / (n - 2)


@dataclass(frozen=True)
class CGState:
    """Third-order phase point: position, unit velocity and acceleration."""

    x: np.ndarray
    u: np.ndarray
    a: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("x", "u", "a"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.u.shape != self.a.shape:
            raise ValueError("u and a must have the same dimension")

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.u, self.a])

    @classmethod
    def from_vector(cls, y, dim: int, t: float = 0.0, ncoord: int | None = None) -> "CGState":
        y = np.asarray(y, dtype=float)
        nc = dim if ncoord is None else ncoord
        return cls(y[:nc], y[nc:nc + dim], y[nc + dim:nc + 2 * dim], t)


@dataclass(frozen=True)
class VBState:
    """Second-order phase point: position, velocity v, one-form b, parameter tau."""

    x: np.ndarray
    v: np.ndarray
    b: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        for name in ("x", "v", "b"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.v, self.b, [self.tau]])

    @classmethod
    def from_vector(cls, y, dim: int) -> "VBState":
        y = np.asarray(y, dtype=float)
        return cls(y[:dim], y[dim:2 * dim], y[2 * dim:3 * dim], float(y[3 * dim]))


@dataclass(frozen=True)
class StateReport:
    norm_error: float
    orthogonality_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.norm_error <= self.tol and self.orthogonality_error <= self.tol

    def __bool__(self) -> bool:
        return self.passed


def validate_state(metric: FrameMetric, s: CGState, sig: Signature, tol: float = 1e-9) -> StateReport:
    """Check ``|eta(u,u) - eps|`` and ``|eta(u,a)|`` against ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    eta = metric.eta_array
    norm_err = abs(frame_norm(eta, s.u) - sig.epsilon)
    orth_err = abs(frame_dot(eta, s.u, s.a))
    return StateReport(norm_err, orth_err, tol)


class EventKind(str, enum.Enum):
    FRAME_SINGULARITY = "frame_singularity"
    BLOWUP = "blowup"
    TURNING_POINT = "turning_point"
    NORM_DRIFT_EXCEEDED = "norm_drift_exceeded"
    DOMAIN_EXIT = "domain_exit"
    CHI_ZERO = "chi_zero"
    CROSSING = "crossing"


@dataclass(frozen=True)
class Event:
    t: float
    kind: EventKind
    name: str = ""
    y: np.ndarray | None = None


@dataclass
class Trajectory:
    """Ordered samples of a flat state vector with events and drift ledger.

    ``y[k]`` is the state at ``t[k]``.  For third-order trajectories the
    layout is ``[x, u, a]`` with ``ncoord`` coordinates and ``dim`` frame
    components each; ``dense`` (when present) evaluates the state at any
    ``t`` inside the sampled range.
    """

    t: np.ndarray
    y: np.ndarray
    events: list[Event] = field(default_factory=list)
    termination: str = "t_max"
    dense: Callable[[float], np.ndarray] | None = None
    dim: int | None = None
    ncoord: int | None = None
    drift: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.y = np.atleast_2d(np.asarray(self.y, dtype=float))
        if self.t.size > 1 and np.any(np.diff(self.t) <= 0):
            raise ValueError("samples must be strictly ordered in t")

    def __len__(self) -> int:
        return self.t.size

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def state(self, k: int) -> CGState:
        if self.dim is None:
            raise ValueError("trajectory has no CGState layout")
        return CGState.from_vector(self.y[k], self.dim, float(self.t[k]), self.ncoord)

    def states(self):
        return [self.state(k) for k in range(len(self))]

    def at(self, t: float) -> np.ndarray:
        if self.dense is None:
            return np.array([np.interp(t, self.t, col) for col in self.y.T])
        return np.asarray(self.dense(t), dtype=float)

    def _slice(self, start: int, width: int) -> np.ndarray:
        return self.y[:, start:start + width]

    @property
    def x(self) -> np.ndarray:
        return self._slice(0, self.ncoord or self.dim)

    @property
    def u(self) -> np.ndarray:
        return self._slice(self.ncoord or self.dim, self.dim)

    @property
    def a(self) -> np.ndarray:
        return self._slice((self.ncoord or self.dim) + self.dim, self.dim)

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind is kind]
