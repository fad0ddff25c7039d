"""Welding diagnostics: real trajectories, the welded-hull criterion, welding
homeomorphisms and quasisymmetry, Hoelder-threshold verdicts, approach
angles, and the hsiz / Monte-Carlo capacity estimators.

The welded criterion is probed on the real line: the forward flow
x' = sum_j 2 lam_j(t) / (x - U_j(t)) is integrated from a grid of start
times and offsets around each driving value; the hulls are reported welded
when every probe survives to the horizon with a terminal margin above the
configured floor. Hitting is a limit statement, so trajectories are deemed
absorbed once |x - U_j| < hit_tol with inward motion.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .driving import MultiSlitSystem, SampledDriving
from .errors import DomainError, InsufficientData, PairingError

HIT_TOL = 1e-7
MARGIN_FLOOR_FACTOR = 1e-4


def thread_count() -> int:
    """Parallelism cap from LOEWNER_THREADS (>= 1)."""
    raw = os.environ.get("LOEWNER_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# real-line flow


def _system_scale(system: MultiSlitSystem) -> float:
    grid = np.linspace(0.0, system.horizon, 33)
    vals = np.stack([d.eval(grid) for d in system.drivings])
    span = float(vals.max() - vals.min())
    return max(span, 0.0) + 2.0 * math.sqrt(system.horizon)


class _RealField:
    """Forward or time-reversed real vector field of the system."""

    def __init__(self, system: MultiSlitSystem, backward: bool):
        self.system = system
        self.backward = backward
        self.horizon = system.horizon

    def u_at(self, t: np.ndarray) -> np.ndarray:
        times = self.horizon - t if self.backward else t
        return np.stack([d.eval(times) for d in self.system.drivings])

    def lam_at(self, t: np.ndarray) -> np.ndarray:
        sys = self.system
        if sys._constant is not None:
            return np.broadcast_to(sys._constant[:, None], (sys.n, len(t)))
        times = self.horizon - t if self.backward else t
        return np.stack([np.asarray(sys.lambdas(float(tt)), dtype=float)
                         for tt in times], axis=1)

    def __call__(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        u = self.u_at(t)
        lam = self.lam_at(t)
        out = np.sum(2.0 * lam / (x[None, :] - u), axis=0)
        return -out if self.backward else out


def _integrate_batch(field: _RealField, t0: np.ndarray, x0: np.ndarray,
                     t_end: float, hit_tol: float,
                     record: bool = False, max_iter: int = 400000):
    """Adaptive RK4 on a batch with per-element steps and hit detection.

    Returns (x_final, t_final, hit_index, hit_time); hit_index is -1 for
    survivors. With ``record`` also returns the (decimated) path of lane 0.
    """
    n = len(x0)
    t = np.array(t0, dtype=float)
    x = np.array(x0, dtype=float)
    hit_idx = np.full(n, -1, dtype=np.int64)
    hit_time = np.full(n, np.nan)
    alive = np.ones(n, dtype=bool)
    path = [(float(t[0]), float(x[0]))] if record else None

    u0 = field.u_at(t)
    if np.any(np.abs(x[None, :] - u0) < hit_tol):
        bad = np.nonzero(np.any(np.abs(x[None, :] - u0) < hit_tol, axis=0))[0]
        raise DomainError(f"probe {bad[0]} starts on a singularity")

    for _ in range(max_iter):
        if not alive.any():
            break
        ia = np.nonzero(alive)[0]
        ta = t[ia]
        xa = x[ia]
        u = field.u_at(ta)
        diff = xa[None, :] - u
        d = np.min(np.abs(diff), axis=0)
        h = np.minimum(np.minimum(0.04 * d * d, t_end / 64.0), t_end - ta)
        h = np.maximum(h, 1e-18 * (1.0 + t_end))
        # keep the singular points' own motion below a fraction of the gap
        for _retry in range(3):
            u_next = field.u_at(ta + h)
            du = np.max(np.abs(u_next - u), axis=0)
            bad = du > 0.25 * d
            if not bad.any():
                break
            ratio = np.minimum(0.25 * d / np.maximum(du, 1e-300), 1.0)
            shrink = np.where(bad, ratio * ratio, 1.0)
            h = np.maximum(h * np.minimum(shrink, 0.5), 1e-18 * (1.0 + t_end))
        k1 = field(ta, xa)
        k2 = field(ta + 0.5 * h, xa + 0.5 * h * k1)
        k3 = field(ta + 0.5 * h, xa + 0.5 * h * k2)
        k4 = field(ta + h, xa + h * k3)
        x_new = xa + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = ta + h

        u_new = field.u_at(t_new)
        diff_new = x_new[None, :] - u_new
        absd = np.abs(diff_new)
        nearest = np.argmin(absd, axis=0)
        dmin = absd[nearest, np.arange(len(ia))]
        crossed = np.any(np.sign(diff_new) != np.sign(diff), axis=0)
        hits = (dmin < hit_tol) | crossed

        x[ia] = x_new
        t[ia] = t_new
        if hits.any():
            ih = ia[hits]
            hit_idx[ih] = nearest[hits]
            hit_time[ih] = t_new[hits]
            alive[ih] = False
        done = t_new >= t_end * (1.0 - 1e-15) - 1e-300
        alive[ia[done & ~hits]] = False
        if record and len(ia) and ia[0] == 0:
            path.append((float(t[0]), float(x[0])))
    else:
        raise DomainError("real-line integration exceeded the iteration cap")

    if record:
        return x, t, hit_idx, hit_time, np.asarray(path)
    return x, t, hit_idx, hit_time


@dataclass
class RealTrajectory:
    """One real-line solution with its fate."""

    start_time: float
    start: float
    path: np.ndarray  # rows (t, x)
    survived: bool
    final_distances: Optional[np.ndarray]  # to each U_j(T) when survived
    hit_index: Optional[int]
    hit_time: Optional[float]


def real_trajectory(system: MultiSlitSystem, tau: float, x0: float,
                    hit_tol: float = HIT_TOL) -> RealTrajectory:
    """Forward real solution from x(tau) = x0 up to the horizon."""
    if not 0.0 <= tau < system.horizon:
        raise DomainError("tau must lie in [0, T)")
    f = _RealField(system, backward=False)
    x, t, hit, hit_time, path = _integrate_batch(
        f, np.array([tau]), np.array([x0]), system.horizon, hit_tol, record=True)
    if hit[0] >= 0:
        return RealTrajectory(tau, x0, path, False, None, int(hit[0]),
                              float(hit_time[0]))
    u_end = system.driving_values(system.horizon)
    return RealTrajectory(tau, x0, path, True,
                          np.abs(x[0] - u_end), None, None)


# ---------------------------------------------------------------------------
# welded criterion


@dataclass
class WeldingReport:
    welded: bool
    verdict: str                     # "welded" | "not_welded" | "indeterminate"
    margin: float
    pairs: List[np.ndarray] = field(default_factory=list)
    qs_constant: Optional[float] = None
    component_intervals: List[Tuple[float, float]] = field(default_factory=list)
    n_probes: int = 0
    min_offset: float = 0.0


def is_welded(system: MultiSlitSystem, grid_times: int = 64,
              grid_offsets: int = 64, *, hit_tol: float = HIT_TOL,
              margin_floor: Optional[float] = None,
              with_pairs: bool = True, pair_samples: int = 24) -> WeldingReport:
    """Probe the welded-hull criterion on a start-time x offset grid.

    welded=True requires every probe to survive with terminal margin at
    least the floor (default 1e-4 x hull scale); confirmed hits give
    "not_welded"; sub-floor margins without hits give "indeterminate".
    """
    scale = _system_scale(system)
    if margin_floor is None:
        margin_floor = MARGIN_FLOOR_FACTOR * scale
    T = system.horizon
    taus = T * np.arange(grid_times) / grid_times
    n_side = max(1, grid_offsets // 2)
    offs = scale * np.geomspace(1e-3, 1.5, n_side)
    field_fwd = _RealField(system, backward=False)

    starts_t = []
    starts_x = []
    for tau in taus:
        u = system.driving_values(tau)
        for j in range(system.n):
            for sgn in (-1.0, 1.0):
                xs = u[j] + sgn * offs
                keep = np.min(np.abs(xs[:, None] - u[None, :]), axis=1) > 4.0 * hit_tol
                starts_t.append(np.full(keep.sum(), tau))
                starts_x.append(xs[keep])
    t0 = np.concatenate(starts_t)
    x0 = np.concatenate(starts_x)
    xf, tf, hit, hit_time = _integrate_batch(field_fwd, t0, x0, T, hit_tol)

    if np.any(hit >= 0):
        margin = 0.0
        report = WeldingReport(False, "not_welded", margin, n_probes=len(x0),
                               min_offset=float(offs[0]))
        return report
    u_end = system.driving_values(T)
    margins = np.min(np.abs(xf[:, None] - u_end[None, :]), axis=1)
    margin = float(margins.min())
    if margin < margin_floor:
        return WeldingReport(False, "indeterminate", margin, n_probes=len(x0),
                             min_offset=float(offs[0]))
    report = WeldingReport(True, "welded", margin, n_probes=len(x0),
                           min_offset=float(offs[0]))
    if with_pairs:
        qs = 1.0
        for j in range(system.n):
            pairs, interval = welding_homeomorphism(system, j, pair_samples,
                                                    hit_tol=hit_tol)
            report.pairs.append(pairs)
            report.component_intervals.append(interval)
            qs = max(qs, quasisymmetry_constant(pairs, float(u_end[j])))
        report.qs_constant = qs
    return report


def _backward_hit_times(system: MultiSlitSystem, j: int, x0: np.ndarray,
                        hit_tol: float) -> np.ndarray:
    """Backward-time hitting times of U_j for starts x0 (inf if missed)."""
    f = _RealField(system, backward=True)
    t0 = np.zeros(len(x0))
    _, _, hit, hit_time = _integrate_batch(f, t0, np.asarray(x0, dtype=float),
                                           system.horizon, hit_tol)
    out = np.where(hit == j, hit_time, np.inf)
    return out


def welding_homeomorphism(system: MultiSlitSystem, j: int, samples: int = 24,
                          *, hit_tol: float = HIT_TOL):
    """Sample the welding pairing of component j.

    Returns (pairs, (a, b)): rows of ``pairs`` are (x, h(x)) with
    x < U_j(T) < h(x) and matching backward hitting times; [a, b] is the
    cluster interval of the component.
    """
    T = system.horizon
    u_end = system.driving_values(T)
    uj = float(u_end[j])
    scale = _system_scale(system)
    lo_lim = uj - 3.0 * scale if j == 0 else 0.5 * (u_end[j - 1] + uj)
    hi_lim = uj + 3.0 * scale if j == system.n - 1 else 0.5 * (uj + u_end[j + 1])

    def hits_j(x):
        return np.isfinite(_backward_hit_times(system, j, np.atleast_1d(x),
                                               hit_tol))

    a = _bracket_boundary(uj, lo_lim, hits_j, hit_tol, scale, left=True)
    b = _bracket_boundary(uj, hi_lim, hits_j, hit_tol, scale, left=False)

    frac = np.linspace(0.04, 0.96, samples)
    xs = uj - frac * (uj - a)
    s_targets = _backward_hit_times(system, j, xs, hit_tol)
    good = np.isfinite(s_targets)
    xs, s_targets = xs[good], s_targets[good]

    lo = np.full(len(xs), uj + 2.0 * hit_tol)
    hi = np.full(len(xs), b)
    # hitting time grows with distance from U_j(T) on each side
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        s_mid = _backward_hit_times(system, j, mid, hit_tol)
        missed = ~np.isfinite(s_mid)
        s_cmp = np.where(missed, np.inf, s_mid)
        too_far = s_cmp > s_targets
        hi = np.where(too_far, mid, hi)
        lo = np.where(too_far, lo, mid)
        if np.max(hi - lo) < 1e-12 * scale:
            break
    ys = 0.5 * (lo + hi)
    s_check = _backward_hit_times(system, j, ys, hit_tol)
    order = np.argsort(s_targets)
    if np.any(np.diff(s_targets[np.argsort(uj - xs[order])]) < -1e-6 * T):
        raise PairingError("backward hitting times are not monotone in the start")
    pairs = np.column_stack([xs, ys])
    return pairs, (float(a), float(b))


def _bracket_boundary(uj, limit, hits_j, hit_tol, scale, left: bool):
    """Outermost start on one side that still hits U_j (cluster endpoint)."""
    sgn = -1.0 if left else 1.0
    inner = uj + sgn * 4.0 * hit_tol
    outer = limit
    if hits_j(outer)[0]:
        return float(outer)
    lo, hi = inner, outer
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if hits_j(mid)[0]:
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) < 1e-10 * scale:
            break
    return float(lo)


def quasisymmetry_constant(pairs: np.ndarray, uj_t: float) -> float:
    """Quasisymmetry constant of a sampled welding pairing.

    Uses both defining families: the two-sided distance ratios
    (x - U)/(U - h(x)) and the equal-spacing triple ratios
    (h(x)-h(y))/(h(y)-h(z)) for y - x = z - y on the right side.
    """
    pairs = np.asarray(pairs, dtype=float)
    if len(pairs) < 3:
        raise DomainError("need at least three pairs")
    left = pairs[:, 0]
    right = pairs[:, 1]
    ratios = (right - uj_t) / np.maximum(uj_t - left, 1e-300)
    m = float(max(np.max(ratios), np.max(1.0 / ratios)))
    # triple family: h maps right-side points to left-side partners
    order = np.argsort(right)
    xr = right[order]
    hl = left[order]
    grid = np.linspace(xr[0], xr[-1], 33)
    hg = np.interp(grid, xr, hl)
    x, y, z = grid[:-2], grid[1:-1], grid[2:]
    num = hg[:-2] - hg[1:-1]
    den = hg[1:-1] - hg[2:]
    good = (np.abs(den) > 1e-300) & (np.abs(num) > 1e-300)
    if np.any(good):
        r = np.abs(num[good] / den[good])
        m = max(m, float(np.max(r)), float(np.max(1.0 / r)))
    return max(m, 1.0)


# ---------------------------------------------------------------------------
# Hoelder diagnostics


@dataclass
class DiagnosticsReport:
    times: np.ndarray
    holder_left: np.ndarray     # windowed one-sided sup quotients
    holder_right: np.ndarray
    limsup_left: np.ndarray     # small-h proxies (left quotients)
    liminf_left: np.ndarray
    thresholds: np.ndarray      # 4 sqrt(lambda_j(t)), = 4 for one slit
    verdicts: List[str]         # "regular" | "irregular" | "violating"
    window: float
    proxy_scale: float          # smallest h examined
    approach: Optional["AngleEstimate"] = None


def local_holder_norms(driving: SampledDriving, window: float, *,
                       lam: Optional[float] = None,
                       t_samples: Optional[np.ndarray] = None,
                       h_floor: float = 1e-6,
                       proxy_scales: int = 6) -> DiagnosticsReport:
    """Windowed 1/2-Hoelder quotients of a driving versus the 4 sqrt(lam)
    threshold.

    Quotients |U(t)-U(s)|/sqrt|t-s| are anchored at each sample t; the
    candidate offsets are the driving's own sample offsets inside the window
    plus a dyadic ladder down to ``h_floor``. The limsup/liminf proxies use
    the smallest ``proxy_scales`` octaves only; "violating" is reported only
    when the liminf proxy exceeds the threshold.
    """
    if window <= 0.0:
        raise DomainError("window must be positive")
    T = driving.horizon
    if t_samples is None:
        t_samples = np.unique(np.concatenate([
            driving.times, np.linspace(0.0, T, 129)]))
    thr = 4.0 * math.sqrt(1.0 if lam is None else lam)

    n_dyadic = max(1, int(math.ceil(math.log2(max(window / h_floor, 2.0)))))
    ladder = window * (0.5 ** np.arange(n_dyadic + 1))
    h_small = ladder[min(len(ladder) - 1, max(0, len(ladder) - proxy_scales)):]

    hl = np.zeros(len(t_samples))
    hr = np.zeros(len(t_samples))
    lsup = np.zeros(len(t_samples))
    linf = np.zeros(len(t_samples))
    verdicts = []
    for i, t in enumerate(t_samples):
        ut = driving.eval(t)

        def quotients(hs):
            hs = hs[hs > 0]
            if len(hs) == 0:
                return np.array([0.0]), np.array([1.0])
            return np.abs(ut - driving.eval(t - hs)) / np.sqrt(hs), hs

        own = t - driving.times
        own = own[(own > 0) & (own <= window)]
        cand = np.unique(np.concatenate([ladder[ladder <= t + 1e-300], own]))
        cand = cand[cand <= t + 1e-18] if t > 0 else cand[:0]
        ql, _ = quotients(cand) if len(cand) else (np.array([0.0]), None)
        hl[i] = np.max(ql)

        own_r = driving.times - t
        own_r = own_r[(own_r > 0) & (own_r <= window)]
        cand_r = np.unique(np.concatenate([ladder, own_r]))
        cand_r = cand_r[cand_r <= T - t + 1e-18] if t < T else cand_r[:0]
        if len(cand_r):
            qr = np.abs(driving.eval(t + cand_r) - ut) / np.sqrt(cand_r)
            hr[i] = np.max(qr)

        small = cand[cand <= h_small[0] * (1.0 + 1e-12)] if len(cand) else cand
        if len(small):
            qs, _ = quotients(small)
            lsup[i] = np.max(qs)
            linf[i] = np.min(qs)
        if linf[i] > thr:
            verdicts.append("violating")
        elif max(lsup[i], 0.0) < thr:
            verdicts.append("regular")
        else:
            verdicts.append("irregular")
    return DiagnosticsReport(times=np.asarray(t_samples), holder_left=hl,
                             holder_right=hr, limsup_left=lsup,
                             liminf_left=linf,
                             thresholds=np.full(len(t_samples), thr),
                             verdicts=verdicts, window=window,
                             proxy_scale=float(h_small[0]))


# ---------------------------------------------------------------------------
# approach angle


@dataclass
class AngleEstimate:
    phi: float
    ci: float
    n_points: int


def approach_angle(points: np.ndarray, base_point: float, *,
                   arc_fraction: float = 0.05,
                   min_points: int = 10) -> AngleEstimate:
    """Angle at which a curve meets R at ``base_point``.

    Fits the mean argument of the innermost points (by arc length from the
    base); the confidence interval comes from the sample spread.
    """
    pts = np.asarray(points, dtype=np.complex128)
    rel = pts - base_point
    rel = rel[np.abs(rel) > 0]
    if len(rel) < min_points:
        raise InsufficientData(f"need >= {min_points} points, got {len(rel)}")
    arcs = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(rel)))])
    cut = arc_fraction * arcs[-1]
    inner = rel[arcs <= cut]
    if len(inner) < min_points:
        inner = rel[np.argsort(arcs)[:min_points]]
    args = np.angle(inner)
    phi = float(np.mean(args))
    ci = float(1.96 * np.std(args) / math.sqrt(len(args)))
    return AngleEstimate(phi=phi, ci=ci, n_points=len(inner))


def approach_coefficient(phi: float, lam: float = 1.0) -> float:
    """Square-root driving limit for a line approach at angle phi."""
    return 2.0 * math.sqrt(lam) * (math.pi - 2.0 * phi) / math.sqrt(
        phi * (math.pi - phi))


# ---------------------------------------------------------------------------
# hsiz and Monte-Carlo capacity


def _densify(vertices: np.ndarray, spacing: float) -> np.ndarray:
    out = [vertices[:1]]
    for p, q in zip(vertices[:-1], vertices[1:]):
        n = max(1, int(math.ceil(abs(q - p) / spacing)))
        out.append(p + (q - p) * (np.arange(1, n + 1) / n))
    return np.concatenate(out)


def hsiz(slits, resolution: float = 1e-3) -> float:
    """Area of the union of disks B(x+iy, y) over the hull points.

    Column-counted exactly at the given resolution: per pixel column the
    union of the disks' vertical chords is measured with a sweep.
    """
    if resolution <= 0.0:
        raise DomainError("resolution must be positive")
    slit_list = slits if isinstance(slits, (list, tuple)) else [slits]
    centers = []
    for s in slit_list:
        verts = s.vertices if hasattr(s, "vertices") else np.asarray(s)
        diam = max(np.ptp(verts.real) + np.ptp(verts.imag), resolution)
        pts = _densify(verts, max(resolution, diam / 4000.0))
        centers.append(pts[pts.imag > 0])
    if not centers:
        return 0.0
    c = np.concatenate(centers)
    if len(c) == 0:
        return 0.0
    cx, cy = c.real, c.imag
    x_min = float(np.min(cx - cy))
    x_max = float(np.max(cx + cy))
    n_cols = int(math.ceil((x_max - x_min) / resolution)) + 1

    # entries (column, chord lo, chord hi) for every disk/column crossing
    first = np.clip(np.ceil((cx - cy - x_min) / resolution - 0.5), 0, n_cols).astype(np.int64)
    last = np.clip(np.floor((cx + cy - x_min) / resolution - 0.5), -1, n_cols - 1).astype(np.int64)
    counts = np.maximum(last - first + 1, 0)
    total = int(counts.sum())
    disk_idx = np.repeat(np.arange(len(c)), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    cols = first[disk_idx] + offsets
    xs = x_min + (cols + 0.5) * resolution
    q = np.sqrt(np.maximum(cy[disk_idx] ** 2 - (xs - cx[disk_idx]) ** 2, 0.0))
    lo = cy[disk_idx] - q
    hi = cy[disk_idx] + q

    # shift each column into its own disjoint band, then one global sweep
    band = 4.0 * float(np.max(cy)) + 1.0
    lo_s = lo + band * cols
    hi_s = hi + band * cols
    order = np.lexsort((lo_s, cols))
    lo_s, hi_s = lo_s[order], hi_s[order]
    reach = np.maximum.accumulate(hi_s)
    reach_excl = np.concatenate([[-np.inf], reach[:-1]])
    add = np.maximum(0.0, hi_s - np.maximum(lo_s, reach_excl))
    return float(add.sum() * resolution)


def _segments(slits) -> Tuple[np.ndarray, np.ndarray]:
    slit_list = slits if isinstance(slits, (list, tuple)) else [slits]
    p, q = [], []
    for s in slit_list:
        verts = s.vertices if hasattr(s, "vertices") else np.asarray(s)
        p.append(verts[:-1])
        q.append(verts[1:])
    if not p:
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=complex)
    return np.concatenate(p), np.concatenate(q)


def _dist_to_segments(z: np.ndarray, p: np.ndarray, q: np.ndarray,
                      want_im: bool = False):
    """Distance from points to a segment family (and Im of nearest point)."""
    d = q - p
    L2 = np.maximum(np.abs(d) ** 2, 1e-300)
    best = np.full(len(z), np.inf)
    best_im = np.zeros(len(z))
    for lo in range(0, len(p), 256):
        pp = p[lo:lo + 256]
        dd = d[lo:lo + 256]
        tproj = np.clip(((z[:, None] - pp) * np.conj(dd)).real / L2[lo:lo + 256],
                        0.0, 1.0)
        foot = pp + tproj * dd
        dist = np.abs(z[:, None] - foot)
        k = np.argmin(dist, axis=1)
        val = dist[np.arange(len(z)), k]
        upd = val < best
        best = np.where(upd, val, best)
        if want_im:
            best_im = np.where(upd, foot[np.arange(len(z)), k].imag, best_im)
    if want_im:
        return best, best_im
    return best


def hcap_monte_carlo(slits, walkers: int = 100000,
                     start_height: Optional[float] = None, seed: int = 0,
                     *, absorb_tol: Optional[float] = None):
    """Walk-on-spheres estimate of hcap via y E^{iy}[Im B_tau].

    Each walker starts at i*start_height and jumps uniformly on the largest
    circle inside H minus the hull; it is absorbed within ``absorb_tol`` of
    the boundary (recording the local Im on the hull, 0 on R) and killed,
    recording 0, far above the start (the escape bias is quadratically
    small). Reproducible for a fixed seed; chunked deterministically so the
    LOEWNER_THREADS worker count cannot change the result.
    """
    if walkers < 1:
        raise DomainError("walkers must be >= 1")
    p, q = _segments(slits)
    if len(p) == 0:
        return 0.0, 0.0
    top = float(np.max(np.maximum(p.imag, q.imag)))
    ends = np.concatenate([p, q])
    x_mid = 0.5 * float(ends.real.min() + ends.real.max())
    span = float(np.max(np.abs(ends - x_mid)))
    if start_height is None:
        start_height = 12.0 * max(top, 1e-6) + 2.0 * span
    scale = max(top, span, 1e-9)
    if absorb_tol is None:
        absorb_tol = 1e-4 * scale
    kill_height = 40.0 * start_height

    n_chunks = 16
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = np.full(n_chunks, walkers // n_chunks)
    sizes[: walkers % n_chunks] += 1

    def run_chunk(args):
        ss, m = args
        if m == 0:
            return np.zeros(0)
        rng = np.random.default_rng(ss)
        # start above the hull's own center: estimates are then
        # translation-equivariant up to float rounding
        z = np.full(m, x_mid + 1j * start_height, dtype=np.complex128)
        val = np.zeros(m)
        alive = np.ones(m, dtype=bool)
        for _ in range(100000):
            idx = np.nonzero(alive)[0]
            if len(idx) == 0:
                break
            za = z[idx]
            d_hull, im_near = _dist_to_segments(za, p, q, want_im=True)
            on_hull = d_hull < absorb_tol
            on_r = (za.imag < absorb_tol) & ~on_hull
            too_high = za.imag > kill_height
            stop = on_hull | on_r | too_high
            if stop.any():
                val[idx[on_hull]] = im_near[on_hull]
                alive[idx[stop]] = False
                idx = idx[~stop]
                if len(idx) == 0:
                    continue
                za = z[idx]
                d_hull = d_hull[~stop]
            r = np.minimum(d_hull, za.imag)
            theta = rng.random(len(idx)) * (2.0 * math.pi)
            z[idx] = za + r * np.exp(1j * theta)
        return start_height * val

    workers = thread_count()
    args = list(zip(seeds, sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, args))
    else:
        results = [run_chunk(a) for a in args]
    xi = np.concatenate(results)
    est = float(np.mean(xi))
    stderr = float(np.std(xi) / math.sqrt(len(xi)))
    return est, stderr
