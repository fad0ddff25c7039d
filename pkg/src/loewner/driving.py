"""Sampled driving functions and multi-slit systems."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError

PIECEWISE_CONSTANT = "piecewise_constant"
PIECEWISE_SQRT = "piecewise_sqrt"
LINEAR = "linear"

_INTERP_ALIASES = {
    "piecewise_constant": PIECEWISE_CONSTANT,
    "const": PIECEWISE_CONSTANT,
    "piecewise_sqrt": PIECEWISE_SQRT,
    "sqrt": PIECEWISE_SQRT,
    "linear": LINEAR,
}


@dataclass(frozen=True)
class SampledDriving:
    """Real driving function on [0, T] given by samples plus an interp mode.

    For ``piecewise_sqrt`` each segment stores the local coefficient c so that
    U(t) = values[i] + coeffs[i] * sqrt(t - times[i]) on [times[i], times[i+1]].
    When ``coeffs`` is omitted it is derived from the endpoint values.
    """

    times: np.ndarray
    values: np.ndarray
    interp: str = LINEAR
    coeffs: Optional[np.ndarray] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        interp = _INTERP_ALIASES.get(self.interp)
        if interp is None:
            raise DomainError(f"unknown interpolation mode {self.interp!r}")
        object.__setattr__(self, "interp", interp)
        if times.ndim != 1 or len(times) != len(values) or len(times) == 0:
            raise DomainError("times and values must be 1-d arrays of equal length")
        if times[0] != 0.0:
            raise DomainError("times must start at 0")
        if len(times) > 1 and np.any(np.diff(times) <= 0.0):
            raise DomainError("times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise DomainError("non-finite driving samples")
        if interp == PIECEWISE_SQRT and len(times) > 1:
            if self.coeffs is None:
                dt = np.diff(times)
                coeffs = np.diff(values) / np.sqrt(dt)
            else:
                coeffs = np.asarray(self.coeffs, dtype=float)
                if len(coeffs) != len(times) - 1:
                    raise DomainError("coeffs must have one entry per segment")
            object.__setattr__(self, "coeffs", coeffs)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Evaluate U(t); vectorized, clamped to [0, T]."""
        scalar = np.isscalar(t)
        tt = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), 0.0, self.horizon)
        if len(self.times) == 1:
            out = np.full_like(tt, self.values[0])
            return float(out[0]) if scalar else out
        idx = np.clip(np.searchsorted(self.times, tt, side="right") - 1, 0,
                      len(self.times) - 2)
        t0 = self.times[idx]
        v0 = self.values[idx]
        if self.interp == PIECEWISE_CONSTANT:
            out = v0.copy()
            out[tt >= self.horizon] = self.values[-1]
        elif self.interp == PIECEWISE_SQRT:
            out = v0 + self.coeffs[idx] * np.sqrt(np.maximum(tt - t0, 0.0))
        else:
            t1 = self.times[idx + 1]
            v1 = self.values[idx + 1]
            lam = (tt - t0) / (t1 - t0)
            out = v0 + lam * (v1 - v0)
        return float(out[0]) if scalar else out

    # -- constructors --------------------------------------------------------

    @staticmethod
    def constant(value: float, horizon: float) -> "SampledDriving":
        return SampledDriving(np.array([0.0, horizon]), np.array([value, value]),
                              PIECEWISE_CONSTANT)

    @staticmethod
    def sqrt_driving(c: float, horizon: float, base: float = 0.0) -> "SampledDriving":
        """Exact single-segment U(t) = base + c*sqrt(t)."""
        return SampledDriving(
            np.array([0.0, horizon]),
            np.array([base, base + c * math.sqrt(horizon)]),
            PIECEWISE_SQRT, coeffs=np.array([c]))

    @staticmethod
    def from_function(fn: Callable[[np.ndarray], np.ndarray], horizon: float,
                      n: int = 1025, interp: str = LINEAR,
                      nodes: Optional[np.ndarray] = None) -> "SampledDriving":
        if nodes is None:
            nodes = np.linspace(0.0, horizon, n)
        vals = np.asarray(fn(nodes), dtype=float)
        return SampledDriving(nodes, vals, interp)

    @staticmethod
    def terminal_sqrt(c: float, horizon: float, base: float = 0.0,
                      octaves: int = 47, per_octave: int = 8) -> "SampledDriving":
        """U(t) = base + c*sqrt(T - t), sampled densely enough near T that the
        square-root blowup survives discretization (geometric node clustering
        down to (T - t)/T ~ 2^-octaves)."""
        rel = 2.0 ** -(np.arange(octaves * per_octave + 1) / per_octave)
        nodes = np.unique(np.concatenate([
            np.linspace(0.0, horizon, 257), horizon * (1.0 - rel), [horizon]]))
        vals = base + c * np.sqrt(np.maximum(horizon - nodes, 0.0))
        return SampledDriving(nodes, vals, LINEAR)

    # -- transforms (scaling/translation/reflection rules) -------------------

    def scaled(self, d: float) -> "SampledDriving":
        """Driving of the hulls scaled by d: t -> d * U(t / d^2)."""
        coeffs = None if self.coeffs is None else self.coeffs
        return SampledDriving(self.times * d * d, self.values * d, self.interp,
                              coeffs=coeffs)

    def translated(self, dx: float) -> "SampledDriving":
        return SampledDriving(self.times, self.values + dx, self.interp,
                              coeffs=self.coeffs)

    def reflected(self) -> "SampledDriving":
        coeffs = None if self.coeffs is None else -self.coeffs
        return SampledDriving(self.times, -self.values, self.interp, coeffs=coeffs)


LambdaSpec = Union[Sequence[float], Callable[[float], Sequence[float]]]


@dataclass
class MultiSlitSystem:
    """Weights and ordered driving functions of the multiple-slit equation.

    ``lambdas`` is either a constant weight vector or a callable t -> vector.
    Ordering U_1(t) < ... < U_n(t) is required at all sampled times.
    """

    lambdas: LambdaSpec
    drivings: Sequence[SampledDriving]
    _constant: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.drivings = list(self.drivings)
        if len(self.drivings) == 0:
            raise DomainError("need at least one driving")
        horizons = {d.horizon for d in self.drivings}
        if len(horizons) > 1:
            raise DomainError(f"drivings must share a horizon, got {horizons}")
        if callable(self.lambdas):
            self._constant = None
        else:
            lam = np.asarray(self.lambdas, dtype=float)
            if lam.shape != (len(self.drivings),):
                raise DomainError("one weight per driving required")
            self._constant = lam
        self._validate()

    @property
    def n(self) -> int:
        return len(self.drivings)

    @property
    def horizon(self) -> float:
        return self.drivings[0].horizon

    def lambda_at(self, t: float) -> np.ndarray:
        if self._constant is not None:
            return self._constant
        lam = np.asarray(self.lambdas(t), dtype=float)
        return lam

    def driving_values(self, t) -> np.ndarray:
        return np.array([d.eval(t) for d in self.drivings])

    def _validate(self):
        grid = np.unique(np.concatenate([d.times for d in self.drivings]))
        for t in np.linspace(0.0, self.horizon, 7):
            lam = self.lambda_at(float(t))
            if np.any(lam < 0.0) or abs(lam.sum() - 1.0) > 1e-12:
                raise DomainError(f"weights at t={t} do not form a convex combination")
        if self.n > 1:
            vals = np.stack([d.eval(grid) for d in self.drivings])
            if np.any(np.diff(vals, axis=0) <= 0.0):
                raise DomainError("drivings must satisfy U_1(t) < ... < U_n(t)")
