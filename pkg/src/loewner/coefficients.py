"""Constant coefficients for disjoint slits via bang-bang growth.

The weights are constructed by growing the slits alternately under a dyadic
on/off schedule: in each of 2^level periods, slit 1 grows on the first
lambda fraction and the others on the rest. Growing one slit is one-slit peeling in
the current mapped domain, so a run is a sequence of budgeted peel steps;
x(lambda) = the slit's own capacity consumed by the horizon is continuous
and nondecreasing in lambda, and bisection plus schedule-level refinement
recovers the unique constant weights.

Own-capacity accounting: each slit is pre-refined and pre-parameterized by
its own hcap-time; a partial peel inside one (small) segment converts its
image-capacity fraction one-to-one into an own-capacity fraction (both
scale quadratically with arc length, so the conformal factor cancels at
leading order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .driving import LINEAR, MultiSlitSystem, SampledDriving
from .errors import (ConvergenceError, DisjointnessError, DomainError,
                     ExhaustedError)
from .inverse import SlitPolyline, _Peeler, refine_to_capacity
from .maps import MapChain

DISJOINTNESS_MARGIN = 1e-6


@dataclass(frozen=True)
class BangBangSchedule:
    """Dyadic on/off growth schedule alpha_{level,lam} scaled to a horizon.

    alpha = 1 (slit 0 grows) on (k/2^level, (k+lam)/2^level) * horizon and
    alpha = 0 (slit 1 grows) on the rest of each period.
    """

    level: int
    lam: float
    horizon: float

    def __post_init__(self):
        if self.level < 0 or not 0.0 <= self.lam <= 1.0 or self.horizon <= 0.0:
            raise DomainError("need level >= 0, lam in [0,1], horizon > 0")

    def intervals(self):
        """Yield (t0, t1, active slit index) covering [0, horizon]."""
        period = self.horizon / 2 ** self.level
        for k in range(2 ** self.level):
            t0 = k * period
            cut = t0 + self.lam * period
            if cut > t0:
                yield (t0, cut, 0)
            if t0 + period > cut:
                yield (cut, t0 + period, 1)


def block_intervals(level: int, weights: Sequence[float], horizon: float):
    """n-slit generalization: per period one sub-interval per slit,
    proportional to the weights."""
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    period = horizon / 2 ** level
    out = []
    for k in range(2 ** level):
        t0 = k * period
        for j, wj in enumerate(w):
            t1 = t0 + wj * period
            if t1 > t0:
                out.append((t0, t1, j))
            t0 = t1
    return out


@dataclass
class SlitPrep:
    """Refined polyline plus its own-capacity parameterization."""

    verts: np.ndarray
    own_caps: np.ndarray  # cumulative own hcap-time per vertex
    total: float          # own hcap-time of the whole slit

    @staticmethod
    def from_slit(slit: SlitPolyline, cap_resolution: float) -> "SlitPrep":
        verts, peeler, durations = refine_to_capacity(slit, cap_resolution)
        caps = np.concatenate([[0.0], np.cumsum(durations)])
        return SlitPrep(verts=verts, own_caps=caps, total=float(caps[-1]))


@dataclass
class GrowthResult:
    achieved: np.ndarray          # own consumed capacity / (2T), per slit
    chain: MapChain
    drivings: List[SampledDriving]
    progress: List[np.ndarray]    # rows (union time, own hcap-time consumed)
    exhausted: Optional[Tuple[int, float]]  # (slit, union time) if early


def _check_disjoint(slits: Sequence[SlitPolyline]):
    diam = max(s.diameter() for s in slits)
    margin = DISJOINTNESS_MARGIN * diam
    for i in range(len(slits)):
        for j in range(i + 1, len(slits)):
            a = slits[i].vertices
            b = slits[j].vertices
            d = _polyline_gap(a, b)
            if d <= margin:
                raise DisjointnessError(
                    f"slits {i} and {j} are {d:.3g} apart (margin {margin:.3g})")


def _polyline_gap(a: np.ndarray, b: np.ndarray) -> float:
    best = np.inf
    for pts, seg in ((a, b), (b, a)):
        p, q = seg[:-1], seg[1:]
        d = q - p
        L2 = np.maximum(np.abs(d) ** 2, 1e-300)
        for z in pts:
            t = np.clip(((z - p) * np.conj(d)).real / L2, 0.0, 1.0)
            best = min(best, float(np.min(np.abs(z - (p + t * d)))))
    return best


class _Growth:
    """State of one alternating-growth run."""

    def __init__(self, preps: Sequence[SlitPrep]):
        self.n = len(preps)
        self.preps = preps
        self.peeler = _Peeler()
        self.verts = [p.verts.astype(np.complex128).copy() for p in preps]
        self.ptr = [1] * self.n
        self.own = np.zeros(self.n)
        self.seg_own_left = [0.0] * self.n   # own capacity left in current segment
        self.seg_started = [False] * self.n
        self.frozen = np.array([p.verts[0] for p in preps], dtype=np.complex128)
        self.rec_t: List[float] = [0.0]
        self.rec_u: List[np.ndarray] = [self.frozen.real.copy()]
        self.rec_own: List[np.ndarray] = [self.own.copy()]

    def exhausted_slit(self, k: int) -> bool:
        return self.ptr[k] >= len(self.verts[k])

    def _tracked_for(self, k: int):
        # everything from each pointer on is forwarded, including the active
        # target (a budgeted peel may leave it unconsumed; after a full peel
        # its stale image is never read). The active slit's frozen tip moves
        # analytically; the others are forwarded.
        tracked = [self.verts[j][self.ptr[j]:] for j in range(self.n)]
        others = np.array([self.frozen[j] for j in range(self.n) if j != k],
                          dtype=np.complex128)
        tracked.append(others)
        return tracked, others

    def grow(self, k: int, budget: float) -> float:
        """Advance slit k by up to ``budget`` hcap-time; returns unspent."""
        while budget > 1e-15 * (1.0 + self.peeler.t):
            if self.exhausted_slit(k):
                return budget
            i = self.ptr[k]
            prep = self.preps[k]
            if not self.seg_started[k]:
                self.seg_own_left[k] = prep.own_caps[i] - prep.own_caps[i - 1]
                self.seg_started[k] = True
            base = float(self.frozen[k].real)
            target = complex(self.verts[k][i])
            # full-peel capacity of the remaining piece of this segment
            from .inverse import _fit_peel
            _, full_dur = _fit_peel(base, target)
            tracked, frozen_others = self._tracked_for(k)
            new_base, dur, finished = self.peeler.peel(base, target, tracked,
                                                       budget=budget)
            pos = 0
            for j in range(self.n):
                if j != k:
                    self.frozen[j] = frozen_others[pos]
                    pos += 1
            if dur <= 0.0 and finished:
                # degenerate (duplicate) vertex: just consume it
                self.own[k] += self.seg_own_left[k]
                self.seg_started[k] = False
                self.ptr[k] += 1
                continue
            self.frozen[k] = new_base
            if finished:
                self.own[k] += self.seg_own_left[k]
                self.seg_own_left[k] = 0.0
                self.seg_started[k] = False
                self.ptr[k] += 1
            else:
                frac = dur / max(full_dur, 1e-300)
                used = self.seg_own_left[k] * frac
                self.own[k] += used
                self.seg_own_left[k] -= used
            budget -= dur
            self.rec_t.append(self.peeler.t)
            self.rec_u.append(self.frozen.real.copy())
            self.rec_own.append(self.own.copy())
        return 0.0

    def result(self, horizon: float,
               exhausted: Optional[Tuple[int, float]]) -> GrowthResult:
        times = np.asarray(self.rec_t)
        uvals = np.vstack(self.rec_u)
        ownvals = np.vstack(self.rec_own)
        drivings = []
        for j in range(self.n):
            t, idx = np.unique(times, return_index=True)
            drivings.append(SampledDriving(t, uvals[idx, j], LINEAR))
        progress = [np.column_stack([times, ownvals[:, j]]) for j in range(self.n)]
        achieved = self.own / (2.0 * horizon)
        return GrowthResult(achieved=achieved, chain=self.peeler.chain,
                            drivings=drivings, progress=progress,
                            exhausted=exhausted)


def grow_alternating(slits: Sequence[SlitPolyline],
                     schedule: Union[BangBangSchedule, Sequence[Tuple[float, float, int]]],
                     *, preps: Optional[Sequence[SlitPrep]] = None,
                     cap_resolution: Optional[float] = None,
                     strict: bool = False) -> GrowthResult:
    """Grow slits alternately per the schedule (one-slit peeling per interval).

    Returns the per-slit consumed capacities; with ``strict`` an early
    exhaustion raises ExhaustedError instead of truncating the run.
    """
    slits = list(slits)
    _check_disjoint(slits)
    if isinstance(schedule, BangBangSchedule):
        if len(slits) != 2:
            raise DomainError("BangBangSchedule drives exactly two slits")
        horizon = schedule.horizon
        intervals = list(schedule.intervals())
    else:
        intervals = list(schedule)
        horizon = max(t1 for _, t1, _ in intervals)
    if preps is None:
        if cap_resolution is None:
            cap_resolution = horizon / 512.0
        preps = [SlitPrep.from_slit(s, cap_resolution) for s in slits]
    growth = _Growth(preps)
    exhausted = None
    for (t0, t1, k) in intervals:
        left = growth.grow(k, t1 - t0)
        if left > 1e-12 * horizon:
            exhausted = (k, t1 - left)
            if strict:
                raise ExhaustedError(
                    f"slit {k} exhausted at union time {exhausted[1]:.6g}")
            break
    return growth.result(horizon, exhausted)


@dataclass
class CoefficientSolution:
    """Constant weights and drivings generating the input slits."""

    lambdas: np.ndarray
    drivings: List[SampledDriving]
    residuals: np.ndarray         # per slit |achieved hcap - target hcap|
    progress: List[np.ndarray]    # per slit rows (union time, own hcap-time)
    iterations: dict
    horizon: float
    hcaps: np.ndarray             # per-slit standalone hcap

    def __post_init__(self):
        if abs(float(np.sum(self.lambdas)) - 1.0) > 1e-10:
            raise DomainError("weights must sum to 1")

    def bounds_ok(self) -> bool:
        """Strict capacity bounds 2T - sum_m hcap_m < 2 lam_k T < hcap_k."""
        two_t = 2.0 * self.horizon
        others = self.hcaps.sum() - self.hcaps
        lhs = two_t - others
        mid = 2.0 * self.lambdas * self.horizon
        return bool(np.all(lhs < mid) and np.all(mid < self.hcaps))


def union_hcap_time(preps: Sequence[SlitPrep]) -> float:
    """hcap-time of the union: peel the slits one after another."""
    peeler = _Peeler()
    verts = [p.verts.astype(np.complex128).copy() for p in preps]
    for k in range(len(preps)):
        vk = verts[k]
        base = float(vk[0].real)
        for i in range(1, len(vk)):
            tracked = [vk[i + 1:]] + [verts[j] for j in range(k + 1, len(preps))]
            base, _, _ = peeler.peel(base, complex(vk[i]), tracked)
    return peeler.t


def find_constant_coefficients(slits: Sequence[SlitPolyline], tol: float = 1e-4,
                               *, start_level: int = 6, max_level: int = 12,
                               cap_resolution: Optional[float] = None
                               ) -> CoefficientSolution:
    """Unique constant weights lambda_1..lambda_n for disjoint slits.

    n = 2: bisection on the bang-bang objective at increasing schedule level
    until the level-to-level movement of lambda drops below tol. n > 2:
    cyclic two-block bisection to a fixed point.
    """
    slits = list(slits)
    n = len(slits)
    if n < 2:
        raise DomainError("need at least two slits")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    _check_disjoint(slits)

    rough = [SlitPrep.from_slit(s, math.inf) for s in slits]
    horizon_guess = sum(p.total for p in rough)
    if cap_resolution is None:
        cap_resolution = max(horizon_guess / 4096.0, min(tol, 1e-3) * horizon_guess)
    preps = [SlitPrep.from_slit(s, cap_resolution) for s in slits]
    horizon = union_hcap_time(preps)
    hcaps = np.array([2.0 * p.total for p in preps])

    evals = {"runs": 0}

    def run(weights: np.ndarray, level: int, active: int) -> Tuple[float, GrowthResult]:
        """Signed objective (own consumed minus target, hcap-time units)."""
        evals["runs"] += 1
        growth = grow_alternating(slits, block_intervals(level, weights, horizon),
                                  preps=preps)
        if growth.exhausted is not None:
            k_ex, t_ex = growth.exhausted
            gap = horizon - t_ex
            sign = 1.0 if k_ex == active else -1.0
            return sign * (gap + tol), growth
        f = float(growth.achieved[active] * 2.0 * horizon - preps[active].total)
        return f, growth

    # -- two-slit core -------------------------------------------------------

    def solve_block(weights: np.ndarray, active: int, level: int,
                    lo: float, hi: float) -> Tuple[float, GrowthResult]:
        """Bisect the active slit's weight; others keep their proportions."""
        best = None
        f_best = math.inf
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            w = weights.copy()
            others = np.delete(np.arange(n), active)
            rest = weights[others] / weights[others].sum()
            w[active] = mid
            w[others] = (1.0 - mid) * rest
            f, growth = run(w, level, active)
            if abs(f) < abs(f_best):
                f_best, best = f, (mid, growth)
            if abs(f) < 0.5 * tol:
                return mid, growth
            if f > 0.0:
                hi = mid
            else:
                lo = mid
            if hi - lo < tol * 1e-3:
                break
        return best

    lam = np.full(n, 1.0 / n)
    level = start_level
    history = []
    prev = None
    while True:
        if n == 2:
            lo, hi = 0.0, 1.0
            if prev is not None:
                lo = max(0.0, prev - 64.0 * tol)
                hi = min(1.0, prev + 64.0 * tol)
                # re-bracket if the warm window misses
                f_lo, _ = run(np.array([lo, 1.0 - lo]), level, 0)
                f_hi, _ = run(np.array([hi, 1.0 - hi]), level, 0)
                if f_lo > 0.0 or f_hi < 0.0:
                    lo, hi = 0.0, 1.0
            lam0, growth = solve_block(np.array([0.5, 0.5]), 0, level, lo, hi)
            lam = np.array([lam0, 1.0 - lam0])
        else:
            for _ in range(24):
                moved = 0.0
                for k in range(n - 1):
                    lam_k, growth = solve_block(lam, k, level, 0.0, 1.0)
                    others = np.delete(np.arange(n), k)
                    rest = lam[others] / lam[others].sum()
                    moved = max(moved, abs(lam[k] - lam_k))
                    lam[k] = lam_k
                    lam[others] = (1.0 - lam_k) * rest
                if moved < tol / 10.0:
                    break
            else:
                raise ConvergenceError("cyclic block bisection did not settle",
                                       {"lam": lam.tolist(), "level": level})
        history.append((level, lam.copy()))
        if prev is not None and abs(lam[0] - prev) < tol:
            break
        if level >= max_level:
            break
        prev = float(lam[0])
        level += 1

    final = grow_alternating(slits, block_intervals(level, lam, horizon),
                             preps=preps)
    res_time = np.abs(final.achieved * 2.0 * horizon -
                      np.array([p.total for p in preps]))
    if np.max(res_time) > 6.0 * tol:
        raise ConvergenceError(
            "bang-bang growth did not reproduce the target capacities",
            {"residuals": res_time.tolist(), "level": level,
             "lambda": lam.tolist()})
    residuals = 2.0 * res_time
    return CoefficientSolution(
        lambdas=lam, drivings=final.drivings, residuals=residuals,
        progress=final.progress,
        iterations={"levels": [h[0] for h in history],
                    "lambda_history": [h[1].tolist() for h in history],
                    "objective_runs": evals["runs"], "final_level": level},
        horizon=horizon, hcaps=hcaps)


@dataclass
class VerificationReport:
    hausdorff: np.ndarray
    diameters: np.ndarray
    xdot0: np.ndarray           # d/dt own-capacity at 0 (2 lambda expected)
    xdot_min_interior: np.ndarray
    capacity_schedules: List[np.ndarray]


def verify_solution(slits: Sequence[SlitPolyline], solution: CoefficientSolution,
                    steps: int = 4000) -> VerificationReport:
    """Closed-loop check: retrace with the constant weights and compare.

    Derivative estimates use the bang-bang progress arrays smoothed over
    whole schedule periods (within a period the raw record is a staircase);
    x is reported in hcap units, so x'(0) is expected to be 2 lambda and the
    interior rates strictly above it.
    """
    from .forward import trace_multi
    from .inverse import polyline_hausdorff

    system = MultiSlitSystem(solution.lambdas, solution.drivings)
    trace = trace_multi(system, steps)
    n = len(slits)
    horizon = solution.horizon
    period = horizon / 2 ** solution.iterations["final_level"]
    haus = np.zeros(n)
    diams = np.zeros(n)
    xdot0 = np.zeros(n)
    xmin = np.zeros(n)
    for k in range(n):
        haus[k] = polyline_hausdorff(trace.curves[k], slits[k].vertices)
        diams[k] = slits[k].diameter()
        prog = solution.progress[k]
        t, x = prog[:, 0], 2.0 * prog[:, 1]
        t_end = t[-1]
        grid = np.arange(0.0, t_end + 0.5 * period, period)
        grid = grid[grid <= t_end + 1e-12 * horizon]
        xg = np.interp(grid, t, x)
        rates = np.diff(xg) / period
        xdot0[k] = rates[0] if len(rates) else math.nan
        mids = 0.5 * (grid[:-1] + grid[1:])
        # skip the start (rate -> 2 lambda there) and a possibly cut tail
        sel = (mids > 0.05 * horizon) & (grid[1:] <= t_end - 0.25 * period)
        xmin[k] = float(rates[sel].min()) if np.any(sel) else math.nan
    return VerificationReport(hausdorff=haus, diameters=diams, xdot0=xdot0,
                              xdot_min_interior=xmin,
                              capacity_schedules=solution.progress)
