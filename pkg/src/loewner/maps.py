"""Exact elementary slit maps of the upper half-plane and their compositions.

An elementary map removes one straight slit from H and renormalizes
hydrodynamically (g(z) = z + 2*duration/z + O(z^-2) at infinity):

* vertical slit at ``base`` with hcap-time ``duration``: the classical
  square-root map, slit height 2*sqrt(duration);
* tilted slit with coefficient ``c``: the exact time-``duration`` solution of
  g' = 2/(g - U) with U(t) = base + c*sqrt(t). Its inverse is
  f(w) = (w + a)^(1-alpha) (w - b)^alpha in coordinates centered at ``base``,
  where alpha = phi/pi and phi = pi/2 (1 - c/sqrt(c^2+16)) is the slit angle.
  Hydrodynamic normalization forces a = alpha*s, b = (1-alpha)*s with
  s = sqrt(duration*(c^2+16)); the critical point w* = c*sqrt(duration) is the
  preimage of the tip, i.e. the driving value after time ``duration``.

A MapChain is an ordered composition of elementary maps; it is the numerical
representative of g_t, and inverted, of f_t = g_t^{-1}. Capacity bookkeeping
is exact: total hcap equals twice the summed durations.

All evaluation keeps the branch whose image lies in the closed upper
half-plane. Points within 1e-13 (relative) of a slit base are prime ends and
need a side tag; see ``boundary_image``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from ._kernels import forward_newton as _kernel_forward_newton
from ._kernels import inverse_map_array, reverse_accumulate
from .errors import BranchError, DomainError, StepError

Direction = Literal["forward", "inverse"]
Side = Literal["left", "right"]

VERTICAL = "vertical"
TILTED = "tilted"

# Tilted-map angles are capped away from 0 and pi: beyond |c| ~ 250 the power
# exponents underflow and the discrete step is meaningless anyway.
_ALPHA_MIN = 1e-5
_BASE_TOL = 1e-13


def angle_of_coefficient(c: float) -> float:
    """Slit angle phi generated by the driving U(t) = c*sqrt(t)."""
    return 0.5 * math.pi * (1.0 - c / math.hypot(c, 4.0))


def coefficient_of_angle(phi: float) -> float:
    """Square-root driving coefficient producing a straight slit at angle phi."""
    if not 0.0 < phi < math.pi:
        raise DomainError(f"angle must lie in (0, pi), got {phi}")
    return 2.0 * (math.pi - 2.0 * phi) / math.sqrt(phi * (math.pi - phi))


def tilted_params(c: float, duration: float):
    """Derived quantities (alpha, s, a, b, wstar, tip) of a tilted map."""
    alpha = 0.5 * (1.0 - c / math.hypot(c, 4.0))
    if not _ALPHA_MIN < alpha < 1.0 - _ALPHA_MIN:
        raise StepError(f"driving slope coefficient c={c} too steep for one step")
    s = math.sqrt(duration * (c * c + 16.0))
    a = alpha * s
    b = (1.0 - alpha) * s
    wstar = c * math.sqrt(duration)
    tip_len = s * math.exp((1.0 - alpha) * math.log1p(-alpha) + alpha * math.log(alpha))
    tip = tip_len * complex(math.cos(alpha * math.pi), math.sin(alpha * math.pi))
    return alpha, s, a, b, wstar, tip


@dataclass(frozen=True)
class ElementaryMap:
    """One exact slit map.

    ``param`` is the capacity increment for vertical maps (equal to
    ``duration``) and the square-root coefficient c for tilted maps.
    """

    kind: str
    base: float
    param: float
    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise DomainError("duration must be >= 0")
        if self.kind not in (VERTICAL, TILTED):
            raise DomainError(f"unknown map kind {self.kind!r}")

    @property
    def c(self) -> float:
        return 0.0 if self.kind == VERTICAL else self.param

    @property
    def slit_height(self) -> float:
        """Height of the removed vertical segment (vertical maps only)."""
        return 2.0 * math.sqrt(self.duration)


def _usqrt(vals: np.ndarray, re_sign: np.ndarray) -> np.ndarray:
    """Square root with image in the closed upper half-plane.

    Real results are disambiguated by ``re_sign`` (sign of the local real
    part of the preimage).
    """
    s = np.sqrt(vals)
    flip = (s.imag < 0.0) | ((s.imag == 0.0) & (re_sign < 0.0))
    return np.where(flip, -s, s)


# ---------------------------------------------------------------------------
# single-map evaluation


def _map_columns(m: ElementaryMap):
    if m.duration == 0.0:
        return None
    if m.kind == VERTICAL:
        h = 2.0 * math.sqrt(m.duration)
        return (m.base, h, h, 0.5, 0.0, complex(0.0, h))
    alpha, _s, a, b, wstar, tip = tilted_params(m.param, m.duration)
    return (m.base, a, b, alpha, wstar, tip)


def _inverse_one(z, base, a, b, alpha):
    w = inverse_map_array(z, base, a, b, alpha)
    return w


def _on_slit_mask(zeta, a, b, alpha, tip, tol):
    """Points lying on the removed slit (segment from 0 to tip)."""
    tip_len = abs(tip)
    if tip_len == 0.0:
        return np.zeros(np.shape(zeta), dtype=bool)
    u = tip / tip_len
    # coordinates along/across the slit direction
    t = (zeta * np.conj(u))
    along = t.real
    across = np.abs(t.imag)
    return (across <= tol) & (along >= -tol) & (along <= tip_len + tol)


def _forward_newton(zeta, a, b, alpha, s, wstar, tip, tol, guess=None):
    """Solve f(w) = zeta for w in the closed upper half-plane (vectorized)."""
    zeta = np.asarray(zeta, dtype=np.complex128)
    duration = alpha * (1.0 - alpha) * s * s / 4.0

    if guess is None:
        den = zeta - wstar
        small = np.abs(den) < 0.5 * s
        den = np.where(small, np.where(den == 0, 1.0, den) *
                       (0.5 * s / np.maximum(np.abs(den), 1e-300)), den)
        guess = zeta + 2.0 * duration / den
    w, converged = _kernel_forward_newton(zeta, guess, a, b, alpha, s, wstar, tol)
    if not converged.all():
        idx = np.nonzero(~converged)[0]
        for k in idx:
            w[k] = _forward_point_fallback(
                complex(zeta.flat[k]), a, b, alpha, s, wstar, tip, duration, tol
            )
    return w


def _forward_point_fallback(zeta, a, b, alpha, s, wstar, tip, duration, tol):
    """Radial continuation from infinity; the slit is star-shaped from the
    base, so scaling paths never cross it."""
    scale = s + abs(zeta)
    if abs(zeta) < 1e-300:
        raise DomainError("forward evaluation at the slit base needs a side tag")
    m0 = max(8.0, 12.0 * s / abs(zeta))
    n_path = 28
    ratios = m0 ** (np.arange(n_path, -1, -1) / n_path)
    z0 = zeta * ratios[0]
    w = z0 + 2.0 * duration / z0
    for r in ratios:
        target = zeta * r
        for _ in range(50):
            wa = w + a
            wb = w - b
            if abs(wa) < 1e-14 * s:
                wa = 1e-14 * s
            if abs(wb) < 1e-14 * s:
                wb = 1e-14 * s
            f = wa * (wb / wa) ** alpha
            F = f - target
            if abs(F) <= tol * scale:
                break
            fp = f * ((1.0 - alpha) / wa + alpha / wb)
            if abs(fp) < 1e-300:
                # critical point: jump with the local quadratic model
                f2 = -tip / (s * s * alpha * (1.0 - alpha))
                w = wstar + np.sqrt(2.0 * (target - tip) / f2)
                if w.imag < 0:
                    w = np.conj(w)
                continue
            step = F / fp
            maxstep = 0.6 * (abs(w - wstar) + 0.25 * s)
            if abs(step) > maxstep:
                step *= maxstep / abs(step)
            w = w - step
            if w.imag < 0:
                w = complex(w.real, 0.0)
    wa = w + a
    wb = w - b
    f = wa * (wb / wa) ** alpha if abs(wa) > 0 else 0.0
    if abs(f - zeta) > 1e-9 * scale:
        # last resort: quadratic local model at the tip, then polish
        f2 = -tip / (s * s * alpha * (1.0 - alpha))
        for cand in (wstar + np.sqrt(2.0 * (zeta - tip) / f2),
                     wstar - np.sqrt(2.0 * (zeta - tip) / f2)):
            if cand.imag < 0:
                cand = np.conj(cand)
            ww = cand
            for _ in range(60):
                wa = ww + a
                wb = ww - b
                if abs(wa) < 1e-14 * s or abs(wb) < 1e-14 * s:
                    break
                f = wa * (wb / wa) ** alpha
                F = f - zeta
                if abs(F) <= tol * scale:
                    return ww
                fp = f * ((1.0 - alpha) / wa + alpha / wb)
                if abs(fp) < 1e-300:
                    break
                step = F / fp
                maxstep = 0.5 * (abs(ww - wstar) + 0.1 * s)
                if abs(step) > maxstep:
                    step *= maxstep / abs(step)
                ww = ww - step
                if ww.imag < 0:
                    ww = complex(ww.real, 0.0)
        raise BranchError(f"forward Newton failed at zeta={zeta}")
    return w


def eval_elementary(m: ElementaryMap, z, direction: Direction):
    """Evaluate one elementary map at ``z`` (complex scalar or array)."""
    cols = _map_columns(m)
    scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if np.any(zz.imag < -1e-12 * (1.0 + np.abs(zz))):
        raise DomainError("point below the real axis")
    if cols is None:
        return complex(zz[0]) if scalar else zz
    base, a, b, alpha, wstar, tip = cols
    if direction == "inverse":
        w = _inverse_one(zz, base, a, b, alpha)
    elif direction == "forward":
        zeta = zz - base
        s = a + b
        tol_on = _BASE_TOL * (s + np.abs(zeta))
        if np.any(_on_slit_mask(zeta, a, b, alpha, tip, tol_on) & (np.abs(zeta) > tol_on)):
            raise DomainError("point lies on the removed slit")
        if np.any(np.abs(zeta) <= tol_on):
            raise DomainError("slit base is a prime end; use boundary_image with a side")
        w = base + _forward_newton(zeta, a, b, alpha, s, wstar, tip, 1e-13)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    _assert_branch(w, np.abs(zz) + a + b)
    return complex(w[0]) if scalar else w


def _assert_branch(w, scale):
    if np.any(np.asarray(w).imag < -1e-9 * (np.asarray(scale) + 1.0)):
        raise BranchError("branch selection produced a point below the real axis")


# ---------------------------------------------------------------------------
# chains


class MapChain:
    """Ordered composition of elementary maps with exact capacity bookkeeping.

    Forward evaluation applies the maps in push order (g_t); inverse
    evaluation composes the member inverses in reverse order (f_t).
    Instances are append-only; all evaluation methods are pure.
    """

    __slots__ = ("_base", "_a", "_b", "_alpha", "_wstar", "_tip", "_dur", "_c",
                 "_kind", "_n", "_cap")

    def __init__(self):
        self._n = 0
        self._cap = 16
        self._base = np.empty(self._cap)
        self._a = np.empty(self._cap)
        self._b = np.empty(self._cap)
        self._alpha = np.empty(self._cap)
        self._wstar = np.empty(self._cap)
        self._tip = np.empty(self._cap, dtype=np.complex128)
        self._dur = np.empty(self._cap)
        self._c = np.empty(self._cap)
        self._kind = []

    def __len__(self):
        return self._n

    @property
    def total_hcap_time(self) -> float:
        return float(self._dur[: self._n].sum())

    @property
    def total_hcap(self) -> float:
        return 2.0 * self.total_hcap_time

    def maps(self):
        return [
            ElementaryMap(self._kind[i], float(self._base[i]),
                          float(self._dur[i]) if self._kind[i] == VERTICAL else float(self._c[i]),
                          float(self._dur[i]))
            for i in range(self._n)
        ]

    def _grow(self):
        self._cap *= 2
        for name in ("_base", "_a", "_b", "_alpha", "_wstar", "_dur", "_c"):
            old = getattr(self, name)
            new = np.empty(self._cap, dtype=old.dtype)
            new[: self._n] = old[: self._n]
            setattr(self, name, new)
        new = np.empty(self._cap, dtype=np.complex128)
        new[: self._n] = self._tip[: self._n]
        self._tip = new

    def push(self, m: ElementaryMap) -> bool:
        """Append a map; zero-duration maps are identities and are dropped."""
        return self.push_tilted(m.base, m.c, m.duration)

    def push_tilted(self, base: float, c: float, duration: float) -> bool:
        if duration == 0.0:
            return False
        if duration < 0.0:
            raise DomainError("duration must be >= 0")
        if self._n == self._cap:
            self._grow()
        i = self._n
        if c == 0.0:
            h = 2.0 * math.sqrt(duration)
            alpha, a, b, wstar, tip = 0.5, h, h, 0.0, complex(0.0, h)
            self._kind.append(VERTICAL)
        else:
            alpha, _s, a, b, wstar, tip = tilted_params(c, duration)
            self._kind.append(TILTED)
        self._base[i] = base
        self._a[i] = a
        self._b[i] = b
        self._alpha[i] = alpha
        self._wstar[i] = wstar
        self._tip[i] = tip
        self._dur[i] = duration
        self._c[i] = c
        self._n += 1
        return True

    def push_vertical(self, base: float, duration: float) -> bool:
        return self.push_tilted(base, 0.0, duration)

    # -- geometry helpers ---------------------------------------------------

    def map_tip(self, i: int) -> complex:
        """Tip of map ``i``'s slit, in the coordinates map ``i`` acts on."""
        return complex(self._base[i] + self._tip[i])

    def map_interval(self, i: int):
        """Cluster interval [base-a, base+b] of map ``i`` on the real line."""
        return (float(self._base[i] - self._a[i]), float(self._base[i] + self._b[i]))

    def driving_range(self):
        if self._n == 0:
            return (0.0, 0.0)
        return (float(self._base[: self._n].min()), float(self._base[: self._n].max()))

    def hull_diameter_estimate(self) -> float:
        lo, hi = self.driving_range()
        t = self.total_hcap_time
        return max(hi - lo + 4.0 * math.sqrt(t), 4.0 * math.sqrt(t), 1e-12)

    # -- evaluation ---------------------------------------------------------

    def _forward_array(self, z, upto: Optional[int] = None, guess_identity=True):
        n = self._n if upto is None else upto
        w = np.array(np.atleast_1d(z), dtype=np.complex128)
        for i in range(n):
            base = self._base[i]
            zeta = w - base
            if self._kind[i] == VERTICAL:
                h = self._a[i]
                w = base + _usqrt(zeta * zeta + h * h, zeta.real)
            else:
                a, b, alpha = self._a[i], self._b[i], self._alpha[i]
                s = a + b
                tol_on = _BASE_TOL * (s + np.abs(zeta))
                if np.any(np.abs(zeta) <= tol_on):
                    raise DomainError(
                        "forward chain evaluation hit a slit base; use boundary_image")
                g = w - base if guess_identity else None
                w = base + _forward_newton(
                    zeta, a, b, alpha, s, self._wstar[i], self._tip[i], 1e-13, guess=g)
        return w

    def _inverse_array(self, z, upto: Optional[int] = None):
        n = self._n if upto is None else upto
        w = np.array(np.atleast_1d(z), dtype=np.complex128)
        if n == 0:
            return w
        starts = np.full(len(w), n, dtype=np.int64)
        return reverse_accumulate(
            self._base[:n], self._a[:n], self._b[:n], self._alpha[:n], w, starts)

    def eval(self, z, direction: Direction, upto: Optional[int] = None):
        """Evaluate the (possibly truncated) chain at ``z``.

        ``upto`` evaluates the sub-chain of the first ``upto`` maps.
        """
        scalar = np.isscalar(z) or getattr(z, "ndim", 0) == 0
        zz = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        if np.any(zz.imag < -1e-12 * (1.0 + np.abs(zz))):
            raise DomainError("point below the real axis")
        if direction == "forward":
            w = self._forward_array(zz, upto)
        elif direction == "inverse":
            w = self._inverse_array(zz, upto)
        else:
            raise ValueError(f"unknown direction {direction!r}")
        _assert_branch(w, np.abs(zz) + self.hull_diameter_estimate())
        return complex(w[0]) if scalar else w

    def reverse_accumulate(self, seeds, starts):
        """Apply member inverses to seeds that join the flow at given depths.

        ``seeds[k]`` receives the inverses of maps ``starts[k]-1 .. 0``;
        ``starts`` must be nondecreasing. Used for bulk tip extraction.
        """
        n = self._n
        return reverse_accumulate(
            self._base[:n], self._a[:n], self._b[:n], self._alpha[:n],
            np.asarray(seeds, dtype=np.complex128),
            np.asarray(starts, dtype=np.int64))

    # -- boundary -----------------------------------------------------------

    def _forward_real_one(self, i: int, x: float, side: Optional[Side]) -> float:
        base = self._base[i]
        a, b, alpha = self._a[i], self._b[i], self._alpha[i]
        s = a + b
        zeta = x - base
        if abs(zeta) <= _BASE_TOL * (s + abs(x)):
            if side is None:
                raise DomainError(
                    f"x={x} is the base of map {i}; a side tag is required")
            return base + (-a if side == "left" else b)
        if self._kind[i] == VERTICAL:
            return base + math.copysign(math.sqrt(zeta * zeta + a * a), zeta)
        return base + _real_forward_tilted(zeta, a, b, alpha, s)

    def boundary_image(self, x: float, side: Optional[Side] = None) -> float:
        """Forward image of a real boundary point.

        ``side`` disambiguates the two prime ends when ``x`` is (mapped onto)
        a slit base. Off the hull the continuation across R is used.
        """
        y = float(x)
        for i in range(self._n):
            y = self._forward_real_one(i, y, side)
        return y

    # -- capacity -----------------------------------------------------------

    def hcap_moment(self, probe_radius: Optional[float] = None) -> float:
        """Estimate hcap from the z + b/z expansion at large |z|.

        Uses Re[z (g(z) - z)] at probe points (the odd-order terms cancel
        because the expansion coefficients are real) plus two-radius
        Richardson extrapolation to suppress the z^-2 term.
        """
        if self._n == 0:
            return 0.0
        if probe_radius is None:
            probe_radius = 100.0 * self.hull_diameter_estimate()
        lo, hi = self.driving_range()
        center = 0.5 * (lo + hi)
        # Re[(z-x0)(g(z)-z)] = b + sum_k c_k cos(k theta)/R^k with real c_k;
        # averaging theta = pi/4 and 3pi/4 cancels every term up to k = 3.
        ang = np.array([0.25, 0.75]) * math.pi
        z = center + probe_radius * np.exp(1j * ang)
        w = self._forward_array(z)
        vals = ((z - center) * (w - z)).real
        return float(0.5 * (vals[0] + vals[1]))


def _real_forward_tilted(zeta: float, a: float, b: float, alpha: float, s: float) -> float:
    """Solve f(w) = zeta on the real line (f is increasing on both branches)."""
    if zeta > 0:
        lo = b  # f(b) = 0 < zeta
        # f(b+u) ~ s^(1-alpha) u^alpha for small u
        if zeta >= s:
            w = zeta + 2.0 * a * b / (zeta + s)
        else:
            w = b + min(s, (zeta / s ** (1.0 - alpha)) ** (1.0 / alpha))
        hi = max(2.0 * w, zeta + 2.0 * s)
        while _f_real(hi, a, b, alpha) < zeta:
            hi *= 2.0
    else:
        hi = -a  # f(-a) = 0 > zeta
        if -zeta >= s:
            w = zeta - 2.0 * a * b / (-zeta + s)
        else:
            w = -a - min(s, ((-zeta) / s ** alpha) ** (1.0 / (1.0 - alpha)))
        lo = min(2.0 * w, zeta - 2.0 * s)
        while _f_real(lo, a, b, alpha) > zeta:
            lo *= 2.0
    w = min(max(w, lo), hi)
    for _ in range(200):
        f = _f_real(w, a, b, alpha)
        if f < zeta:
            lo = w
        else:
            hi = w
        fp = f * ((1.0 - alpha) / (w + a) + alpha / (w - b)) if (w > b or w < -a) else 0.0
        w_new = w - (f - zeta) / fp if fp > 0 else 0.5 * (lo + hi)
        if not (lo <= w_new <= hi):
            w_new = 0.5 * (lo + hi)
        if abs(w_new - w) <= 1e-15 * (abs(w) + s):
            return w_new
        w = w_new
    return w


def _f_real(w: float, a: float, b: float, alpha: float) -> float:
    """Real values of the inverse map on R outside the cluster interval."""
    if w >= b:
        if w == b:
            return 0.0
        return (w + a) * ((w - b) / (w + a)) ** alpha
    if w <= -a:
        if w == -a:
            return 0.0
        return -((-(w + a)) ** (1.0 - alpha)) * (b - w) ** alpha
    raise DomainError("real forward evaluation inside the cluster interval")


def chain_eval(chain: MapChain, z, direction: Direction):
    """Functional wrapper over :meth:`MapChain.eval`."""
    return chain.eval(z, direction)


def boundary_image(chain: MapChain, x: float, side: Optional[Side] = None) -> float:
    return chain.boundary_image(x, side)


def hcap_moment(chain: MapChain, probe_radius: Optional[float] = None) -> float:
    return chain.hcap_moment(probe_radius)
