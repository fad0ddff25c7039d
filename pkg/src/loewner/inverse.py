"""Slit polylines to driving functions: zipper-style peeling.

One peel step fits the exact tilted-slit map whose straight segment runs
from the current base through the image of the next vertex (the fit is
closed-form: the angle fixes the square-root coefficient, the length fixes
the capacity), pushes it onto the chain, and maps the remaining vertices
forward. The recorded base positions are the driving function; the record is
exact per step because the composed flow's singularity during a step is the
step map's own base + c*sqrt(t - t_i).

Segments whose peeled capacity exceeds the requested resolution are split in
the ORIGINAL coordinates (splitting mapped chords would converge to the
chord path, not the curve), using a measure-then-refine pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .driving import PIECEWISE_SQRT, SampledDriving
from .errors import DomainError, GeometryError, ResolutionError, StepError
from .maps import MapChain, _forward_newton, tilted_params

_IM_TOL = 1e-9
_MIN_ANGLE = math.pi * 2e-5


@dataclass(frozen=True)
class SlitPolyline:
    """Ordered simple curve from a real base point into the upper half-plane."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.complex128)
        if v.ndim != 1 or len(v) < 2:
            raise DomainError("a slit needs at least two vertices")
        scale = float(np.max(np.abs(v)) + 1.0)
        if abs(v[0].imag) > 1e-12 * scale:
            raise DomainError("vertices[0] must lie on the real axis")
        v = v.copy()
        v[0] = complex(v[0].real, 0.0)
        if np.any(v[1:].imag <= 0.0):
            raise DomainError("all vertices after the base must lie in H")
        object.__setattr__(self, "vertices", v)
        _check_simple(v)

    @property
    def base(self) -> float:
        return float(self.vertices[0].real)

    @property
    def tip(self) -> complex:
        return complex(self.vertices[-1])

    def diameter(self) -> float:
        v = self.vertices
        return float(max(np.ptp(v.real), np.ptp(v.imag), 1e-300))

    def scaled(self, d: float) -> "SlitPolyline":
        return SlitPolyline(self.vertices * d)

    def translated(self, dx: float) -> "SlitPolyline":
        return SlitPolyline(self.vertices + dx)

    def reflected(self) -> "SlitPolyline":
        return SlitPolyline(-np.conj(self.vertices))


def _check_simple(v: np.ndarray, tol: float = 1e-12):
    """Reject self-intersecting polylines (bucketed sweep for large inputs)."""
    n = len(v) - 1
    if n < 2:
        return
    p = v[:-1]
    q = v[1:]
    if n <= 1200:
        _check_pairs(p, q, np.arange(n), np.arange(n), tol)
        return
    size = float(np.median(np.abs(q - p)) * 4.0 + 1e-300)
    mid = (p + q) / 2.0
    cx = np.floor(mid.real / size).astype(np.int64)
    cy = np.floor(mid.imag / size).astype(np.int64)
    buckets = {}
    for i in range(n):
        buckets.setdefault((cx[i], cy[i]), []).append(i)
    for (bx, by), idx in buckets.items():
        near = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                near.extend(buckets.get((bx + dx, by + dy), ()))
        _check_pairs(p, q, np.asarray(idx), np.asarray(near), tol)


def _check_pairs(p, q, ii, jj, tol):
    scale = float(np.max(np.abs(p)) + np.max(np.abs(q)) + 1.0)
    for i in ii:
        js = jj[jj > i + 1]
        if len(js) == 0:
            continue
        if _segments_intersect(p[i], q[i], p[js], q[js], tol * scale):
            raise DomainError("slit polyline is not simple")


def _segments_intersect(a0, a1, b0, b1, tol):
    d1 = a1 - a0
    d2 = b1 - b0
    denom = d1.real * d2.imag - d1.imag * d2.real
    r0 = b0 - a0
    t_num = r0.real * d2.imag - r0.imag * d2.real
    s_num = r0.real * d1.imag - r0.imag * d1.real
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom != 0, t_num / denom, np.inf)
        s = np.where(denom != 0, s_num / denom, np.inf)
    hit = (t > tol) & (t < 1 - tol) & (s > tol) & (s < 1 - tol)
    return bool(np.any(hit))


@dataclass(frozen=True)
class ParameterizedSlit:
    """Slit samples in the canonical parameterization hcap(gamma(0,t]) = 2t."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.points, dtype=np.complex128)
        if len(t) != len(p) or len(t) < 2:
            raise DomainError("need matching times/points with >= 2 samples")
        if np.any(np.diff(t) < 0.0):
            raise DomainError("capacity times must be nondecreasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)

    @property
    def total(self) -> float:
        return float(self.times[-1])

    def at(self, t) -> np.ndarray:
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        re = np.interp(tt, self.times, self.points.real)
        im = np.interp(tt, self.times, self.points.imag)
        return re + 1j * im


@dataclass
class DriveResult:
    """Output of drive_from_slit: the driving plus peeling byproducts.

    ``prime_end_pairs`` rows are (hcap-time of the slit point, final left
    prime-end image, final right prime-end image); they sample the welding
    homeomorphism of the slit.
    """

    driving: SampledDriving
    parameterized: ParameterizedSlit
    chain: MapChain
    prime_end_pairs: np.ndarray
    used_vertical_fallback: bool = False

    @property
    def total_hcap_time(self) -> float:
        return self.parameterized.total


def _fit_peel(base: float, v: complex) -> Tuple[float, float]:
    """Closed-form (c, duration) of the tilted map from ``base`` through v."""
    d = v - base
    rho = abs(d)
    phi = math.atan2(d.imag, d.real)
    if not _MIN_ANGLE < phi < math.pi - _MIN_ANGLE:
        raise GeometryError(
            f"peel segment at angle {phi:.2e} is (numerically) tangent to R")
    alpha = phi / math.pi
    c = 2.0 * (math.pi - 2.0 * phi) / math.sqrt(phi * (math.pi - phi))
    # tip length = 2 sqrt(duration) ((1-alpha)/alpha)^(1/2-alpha)
    k = ((1.0 - alpha) / alpha) ** (0.5 - alpha)
    duration = (rho / (2.0 * k)) ** 2
    return c, duration


class _Peeler:
    """Incremental one-slit peeling; shared by the inverse and coefficient
    solvers. Tracked points (vertices of this and other slits, frozen real
    tips, recorded prime ends) are pushed through every new map."""

    def __init__(self, record_ends: bool = False):
        self.chain = MapChain()
        self.times: List[float] = [0.0]
        self.bases: List[float] = []
        self.coeffs: List[float] = []
        self.record_ends = record_ends
        self.ends = np.empty(0, dtype=np.complex128)  # interleaved (left, right)
        self.end_times: List[float] = []
        self.used_vertical_fallback = False

    @property
    def t(self) -> float:
        return self.times[-1]

    def peel(self, base: float, target: complex, tracked: List[np.ndarray],
             budget: Optional[float] = None):
        """Peel from ``base`` toward ``target``.

        Returns (new_base, duration, finished). With a ``budget`` the peel is
        truncated to that capacity and stays on the segment (finished=False);
        the caller keeps the target vertex. ``tracked`` complex arrays are
        mapped forward in place.
        """
        c, dur = _fit_peel(base, target)
        finished = True
        if budget is not None and dur > budget * (1.0 + 1e-12):
            dur = budget
            finished = False
        if dur <= 0.0 or self.t + dur == self.t:
            # below clock resolution: consume the vertex without a map
            return base, 0.0, True
        alpha, s, a, b, wstar, tip = tilted_params(c, dur)
        self.chain.push_tilted(base, c, dur)
        if not self.bases:
            self.bases.append(base)
        self.coeffs.append(c)
        new_base = base + wstar
        n_old_ends = len(self.ends)
        if self.record_ends:
            self.end_times.append(self.t)
            self.ends = np.concatenate(
                [self.ends, [complex(base - a), complex(base + b)]])
        self.times.append(self.t + dur)
        self.bases.append(new_base)
        self._forward_all(tracked, n_old_ends, base, a, b, alpha, s, wstar, tip)
        return new_base, dur, finished

    def push_vertical_fallback(self, base: float, target: complex,
                               tracked: List[np.ndarray]):
        """First-peel fallback for inputs tangent to R at the base."""
        h = abs(target - base)
        dur = h * h / 4.0
        self.chain.push_vertical(base, dur)
        if not self.bases:
            self.bases.append(base)
        self.coeffs.append(0.0)
        n_old_ends = len(self.ends)
        if self.record_ends:
            self.end_times.append(self.t)
            self.ends = np.concatenate(
                [self.ends, [complex(base - h), complex(base + h)]])
        self.times.append(self.t + dur)
        self.bases.append(base)
        self._forward_all(tracked, n_old_ends, base, h, h, 0.5, 2 * h, 0.0,
                          complex(0.0, h))
        self.used_vertical_fallback = True
        return base, dur, True

    def _forward_all(self, tracked, n_ends, base, a, b, alpha, s, wstar, tip):
        # the newest prime-end pair (beyond n_ends) is already in new coords
        arrs = [arr for arr in tracked if len(arr)]
        sizes = [len(arr) for arr in arrs]
        blob = np.concatenate([arr for arr in arrs] + [self.ends[:n_ends]]) \
            if (arrs or n_ends > 0) else np.empty(0, dtype=np.complex128)
        if len(blob) == 0:
            return
        real_in = blob.imag == 0.0
        zeta = blob - base
        w = _forward_newton(zeta, a, b, alpha, s, wstar, tip, 1e-13)
        scale = np.abs(zeta) + s
        if np.any(w.imag < -_IM_TOL * scale):
            raise GeometryError("peeled image left the upper half-plane")
        out = base + w
        out[real_in] = out[real_in].real  # boundary points stay on R
        pos = 0
        for arr, size in zip(arrs, sizes):
            arr[:] = out[pos:pos + size]
            pos += size
        if n_ends > 0:
            self.ends[:n_ends] = out[pos:pos + n_ends]

    def driving(self) -> SampledDriving:
        return SampledDriving(np.asarray(self.times), np.asarray(self.bases),
                              PIECEWISE_SQRT, coeffs=np.asarray(self.coeffs))

    def prime_end_pairs(self) -> np.ndarray:
        if len(self.end_times) == 0:
            return np.zeros((0, 3))
        return np.column_stack([np.asarray(self.end_times),
                                self.ends[0::2].real, self.ends[1::2].real])


def _peel_polyline(verts: np.ndarray, allow_fallback: bool = False,
                   record_ends: bool = False):
    """Peel a whole polyline; returns (peeler, per-segment durations)."""
    peeler = _Peeler(record_ends=record_ends)
    work = verts.astype(np.complex128).copy()
    base = float(work[0].real)
    durations = np.zeros(len(verts) - 1)
    leading = True  # vertical fallback is allowed only for a tangent approach
    for i in range(1, len(work)):
        target = complex(work[i])
        tracked = [work[i + 1:]]
        try:
            base, dur, _ = peeler.peel(base, target, tracked)
            leading = False
        except (GeometryError, StepError):
            if allow_fallback and leading:
                base, dur, _ = peeler.push_vertical_fallback(base, target, tracked)
            else:
                raise
        durations[i - 1] = dur
    return peeler, durations


def _refine(verts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    out = [verts[0]]
    for i in range(len(verts) - 1):
        m = int(counts[i])
        for j in range(1, m + 1):
            out.append(verts[i] + (verts[i + 1] - verts[i]) * (j / m))
    return np.asarray(out)


def refine_to_capacity(slit: SlitPolyline, dcap: float, max_passes: int = 3,
                       record_ends: bool = False):
    """Subdivide (in original coordinates) until every peel stays under dcap.

    Returns (refined vertices, peeler of the final pass, per-segment durations).
    """
    verts = slit.vertices.copy()
    need_ends = record_ends and max_passes == 1
    peeler, durations = _peel_polyline(verts, allow_fallback=True,
                                       record_ends=need_ends)
    for i in range(max_passes - 1):
        if len(durations) and np.max(durations) <= dcap:
            break
        counts = np.maximum(1, np.ceil(np.sqrt(durations / dcap) * 1.3)).astype(int)
        verts = _refine(verts, counts)
        peeler, durations = _peel_polyline(verts, allow_fallback=True)
    if record_ends and not peeler.record_ends:
        peeler, durations = _peel_polyline(verts, allow_fallback=True,
                                           record_ends=True)
    return verts, peeler, durations


def drive_from_slit(slit: SlitPolyline, dcap: float = 1e-3, *,
                    max_passes: int = 3, pairs: bool = False) -> DriveResult:
    """Recover the unique continuous driving function of a slit.

    ``dcap`` is the target hcap-time per peeling step. The output driving is
    piecewise-sqrt with the recorded per-step coefficients; it is continuous
    by construction. Raises ResolutionError when dcap cannot resolve the slit
    at all (a single step would swallow it).
    """
    if dcap <= 0.0:
        raise DomainError("dcap must be positive")
    verts, peeler, durations = refine_to_capacity(slit, dcap, max_passes,
                                                  record_ends=pairs)
    total = peeler.t
    if dcap >= total > 0.0:
        raise ResolutionError(
            f"dcap={dcap} does not resolve the slit (total hcap-time {total:.3g})")
    parameterized = ParameterizedSlit(np.asarray(peeler.times), verts)
    return DriveResult(driving=peeler.driving(), parameterized=parameterized,
                       chain=peeler.chain,
                       prime_end_pairs=peeler.prime_end_pairs(),
                       used_vertical_fallback=peeler.used_vertical_fallback)


def hcap_of_slit(slit: SlitPolyline, dcap: float = 1e-3) -> float:
    """Half-plane capacity of a slit: twice the peeled hcap-time."""
    _, peeler, _ = refine_to_capacity(slit, dcap)
    return 2.0 * peeler.t


def reparameterize_by_hcap(slit: SlitPolyline, samples: int,
                           dcap: Optional[float] = None) -> ParameterizedSlit:
    """Sample the slit at uniformly spaced hcap-times from 0 to T."""
    if samples < 2:
        raise DomainError("samples must be >= 2")
    if dcap is None:
        _, rough_peeler, _ = refine_to_capacity(slit, math.inf, max_passes=1)
        dcap = max(rough_peeler.t, 1e-300) / (8.0 * samples)
    result = drive_from_slit(slit, dcap)
    par = result.parameterized
    grid = np.linspace(0.0, par.total, samples)
    pts = par.at(grid)
    pts[0] = slit.vertices[0]
    pts[-1] = slit.vertices[-1]
    return ParameterizedSlit(grid, pts)


def polyline_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two polylines (point-to-segment)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)

    def directed(pts, poly):
        if len(poly) == 1:
            return float(np.max(np.abs(pts - poly[0])))
        p, q = poly[:-1], poly[1:]
        d = q - p
        L2 = np.maximum(np.abs(d) ** 2, 1e-300)
        worst = 0.0
        for lo in range(0, len(pts), 512):
            z = pts[lo:lo + 512, None]
            t = np.clip(((z - p) * np.conj(d)).real / L2, 0.0, 1.0)
            dist = np.min(np.abs(z - (p + t * d)), axis=1)
            worst = max(worst, float(dist.max()))
        return worst

    return max(directed(a, b), directed(b, a))
