"""Driving functions to hull traces: the forward Loewner solvers.

Discretization: each hcap-time micro-step [t, t+dt] pushes one exact
elementary map. The driving is modeled on the step by
U(s) = U(t) + c * sqrt(s - t) with c chosen to match the endpoint values
(exact when the driving is itself a square-root segment starting at t, and
the natural local model near regular points otherwise). Piecewise-constant
drivings hold the current value, giving vertical-slit steps.

Tips are extracted exactly: the tip at time t_k is the inverse image of the
k-th map's closed-form slit tip under the first k-1 maps, which avoids the
boundary limit z -> U(t) entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .driving import PIECEWISE_CONSTANT, PIECEWISE_SQRT, LINEAR, MultiSlitSystem, SampledDriving
from .errors import CollisionError, DomainError, StepError
from .maps import MapChain

COLLISION_FLOOR = 1e-8


@dataclass
class TraceResult:
    """Traced curves plus the chain that generated them.

    ``hcap_schedule[k]`` is the cumulative hcap-time consumed by curve k at
    each grid time (for constant weights this is lambda_k * t by bookkeeping).
    """

    times: np.ndarray
    curves: List[np.ndarray]
    chain: MapChain
    hcap_schedule: List[np.ndarray]

    @property
    def curve(self) -> np.ndarray:
        if len(self.curves) != 1:
            raise ValueError("trace has more than one curve")
        return self.curves[0]


def _step_grid(driving: SampledDriving, steps: int) -> np.ndarray:
    grid = np.linspace(0.0, driving.horizon, steps + 1)
    if driving.interp == PIECEWISE_SQRT and 1 < len(driving.times) <= max(steps // 4, 2):
        grid = np.unique(np.concatenate([grid, driving.times]))
        # collapse near-duplicates from grid/breakpoint collisions
        keep = np.empty(len(grid), dtype=bool)
        keep[0] = True
        keep[1:] = np.diff(grid) > 1e-12 * max(driving.horizon, 1e-300)
        keep[-1] = True
        grid = grid[keep]
        if len(grid) >= 2 and grid[-1] - grid[-2] <= 1e-12 * driving.horizon:
            grid = np.delete(grid, len(grid) - 2)
    return grid


def _push_step(chain: MapChain, u0: float, u1: float, dt: float,
               piecewise_constant: bool) -> None:
    if dt <= 0.0:
        return
    c = 0.0 if piecewise_constant else (u1 - u0) / math.sqrt(dt)
    chain.push_tilted(u0, c, dt)


def trace_single(driving: SampledDriving, steps: int, *,
                 divergence_check: bool = False,
                 divergence_bound: Optional[float] = None) -> TraceResult:
    """Trace the hull of the one-slit equation driven by ``driving``.

    With ``divergence_check`` the trace is recomputed at twice the steps and a
    StepError is raised if any grid tip moves by more than
    ``divergence_bound`` (default: half the hull scale); this flags
    degenerate drivings at double the cost.
    """
    if steps < 1:
        raise DomainError("steps must be >= 1")
    result = _trace_single_raw(driving, steps)
    if divergence_check:
        fine = _trace_single_raw(driving, 2 * steps)
        bound = divergence_bound
        if bound is None:
            bound = 0.5 * (2.0 * math.sqrt(driving.horizon) +
                           float(np.ptp(driving.values)))
        coarse_on_fine = np.interp(result.times, fine.times, fine.curves[0].real) \
            + 1j * np.interp(result.times, fine.times, fine.curves[0].imag)
        move = np.max(np.abs(coarse_on_fine - result.curves[0]))
        if move > bound:
            raise StepError(
                f"refinement moved the trace by {move:.3g} > bound {bound:.3g}")
    return result


def _trace_single_raw(driving: SampledDriving, steps: int) -> TraceResult:
    grid = _step_grid(driving, steps)
    uvals = driving.eval(grid)
    chain = MapChain()
    seeds = np.empty(len(grid) - 1, dtype=np.complex128)
    starts = np.empty(len(grid) - 1, dtype=np.int64)
    pc = driving.interp == PIECEWISE_CONSTANT
    k = 0
    for i in range(len(grid) - 1):
        dt = grid[i + 1] - grid[i]
        _push_step(chain, uvals[i], uvals[i + 1], dt, pc)
        # tip after this step: the new map's own tip pulled back through the
        # chain built so far (exact; no epsilon limit needed)
        seeds[k] = chain.map_tip(len(chain) - 1)
        starts[k] = len(chain) - 1
        k += 1
    tips = chain.reverse_accumulate(seeds[:k], starts[:k])
    curve = np.concatenate([[complex(uvals[0], 0.0)], tips])
    if not np.all(np.isfinite(curve.view(float))):
        raise StepError("trace produced non-finite points")
    return TraceResult(times=grid, curves=[curve], chain=chain,
                       hcap_schedule=[grid.copy()])


def trace_multi(system: MultiSlitSystem, steps: int, *,
                collision_floor: float = COLLISION_FLOOR) -> TraceResult:
    """Trace the multiple-slit equation by operator splitting.

    Each macro-step of hcap-time D applies one elementary sub-step of
    hcap-time lambda_k * D per slit, based at the current image of that
    slit's tip. The within-step order alternates (k = 1..n on even steps,
    n..1 on odd ones) to suppress first-order splitting bias.
    """
    if steps < 1:
        raise DomainError("steps must be >= 1")
    n = system.n
    horizon = system.horizon
    grid = np.linspace(0.0, horizon, steps + 1)
    chain = MapChain()
    seeds = [[] for _ in range(n)]
    starts = [[] for _ in range(n)]
    consumed = np.zeros(n)
    schedule = [np.zeros(steps + 1) for _ in range(n)]
    u_prev = system.driving_values(0.0)
    # mapped position of each slit's growing tip; drivings steer via their
    # increments while attachment stays on the tip (keeps components
    # connected even for inconsistent driving inputs)
    tip_pos = u_prev.astype(float).copy()

    for i in range(steps):
        t0, t1 = grid[i], grid[i + 1]
        dt = t1 - t0
        lam = system.lambda_at(t0)
        u0 = u_prev
        u1 = system.driving_values(t1)
        gaps = np.diff(np.sort(tip_pos))
        if n > 1 and np.any(gaps < collision_floor):
            raise CollisionError(
                f"tip images within {gaps.min():.3g} at t={t0:.6g}")
        order = range(n) if i % 2 == 0 else range(n - 1, -1, -1)
        for k in order:
            sub = lam[k] * dt
            if sub <= 0.0:
                continue
            base = float(tip_pos[k])
            # the driving increment contains the expansion induced by the
            # other slits; the sub-maps apply that expansion explicitly, so
            # only the residual (own steering) goes into the coefficient.
            # Consistent weight-lambda drivings keep the sub-clock steering
            # near the 4 sqrt(lambda)/sqrt(lambda) = 4 scale; a demand far
            # beyond it means the driving cannot belong to this weight, and
            # the slit is advected passively for the step.
            adv = dt * sum(2.0 * lam[j] / (u0[k] - u0[j])
                           for j in range(n) if j != k)
            c = (u1[k] - u0[k] - adv) / math.sqrt(sub)
            if abs(c) > 8.0:
                c = 0.0
            if chain.push_tilted(base, c, sub):
                idx = len(chain) - 1
                seeds[k].append(chain.map_tip(idx))
                starts[k].append(idx)
                consumed[k] += sub
                tip_pos[k] = base + c * math.sqrt(sub)
                for j in range(n):
                    if j != k:
                        tip_pos[j] = chain._forward_real_one(idx, tip_pos[j],
                                                             None)
        for k in range(n):
            schedule[k][i + 1] = consumed[k]
        u_prev = u1

    curves = []
    for k in range(n):
        tips = chain.reverse_accumulate(
            np.array(seeds[k], dtype=np.complex128),
            np.array(starts[k], dtype=np.int64))
        u_k0 = system.drivings[k].eval(0.0)
        curve = np.concatenate([[complex(u_k0, 0.0)], tips])
        if not np.all(np.isfinite(curve.view(float))):
            raise StepError(f"trace of slit {k} produced non-finite points")
        curves.append(curve)
    return TraceResult(times=grid, curves=curves, chain=chain,
                       hcap_schedule=schedule)


def steer_through(z0: complex, z1: complex, *, samples: int = 4097):
    """Driving that steers the backward point flow from z0 through z1.

    Returns ``(driving, t_star)`` with the explicit construction
    U(t) = 2 c sqrt(4 t / (1+c^2) + y0^2) + x0 - c y0,
    c = (Re z1 - Re z0)/(Im z1 - Im z0), reaching z1 at
    t_star = (1+c^2)(Im z1^2 - Im z0^2)/4. The trajectory solves
    w' = -2/(w - U(t)), w(0) = z0, and runs along the straight segment
    from z0 to z1.
    """
    z0 = complex(z0)
    z1 = complex(z1)
    x0, y0 = z0.real, z0.imag
    if y0 <= 0.0:
        raise DomainError("z0 must lie in the open upper half-plane")
    if z1 == z0:
        return SampledDriving(np.array([0.0]), np.array([x0])), 0.0
    if z1.imag <= y0:
        raise DomainError("target must satisfy Im z1 > Im z0 (Schwarz lemma)")
    c = (z1.real - x0) / (z1.imag - y0)
    t_star = (1.0 + c * c) * (z1.imag ** 2 - y0 ** 2) / 4.0

    def u(t):
        return 2.0 * c * np.sqrt(4.0 * t / (1.0 + c * c) + y0 * y0) + x0 - c * y0

    driving = SampledDriving.from_function(u, t_star, n=samples, interp=LINEAR)
    return driving, float(t_star)


def backward_trajectory(driving: SampledDriving, z0: complex, t_end: float,
                        n_steps: int = 4096) -> np.ndarray:
    """Integrate w' = -2/(w - U(t)) from z0 (classic RK4; Im only grows)."""
    ts = np.linspace(0.0, t_end, n_steps + 1)
    w = complex(z0)
    out = np.empty(n_steps + 1, dtype=complex)
    out[0] = w

    def f(t, w):
        return -2.0 / (w - driving.eval(t))

    for i in range(n_steps):
        t, h = ts[i], ts[i + 1] - ts[i]
        k1 = f(t, w)
        k2 = f(t + 0.5 * h, w + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, w + 0.5 * h * k2)
        k4 = f(t + h, w + h * k3)
        w = w + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = w
    return out


def self_similar_zigzag(c_target: float, depth: int) -> SampledDriving:
    """Self-similar tooth driving whose left Hoelder quotient at t=1 is C.

    Teeth n = 0..depth-1 place U = 0 at r_n = 1 - 2^-n and
    U = C * sqrt(3 / 2^(n+2)) at the midpoints w_n = 1 - 3/2^(n+2); the tail
    past r_depth is truncated to 0 and U(1) = 0.
    """
    if c_target <= 0.0:
        raise DomainError("C must be positive")
    if not 1 <= depth <= 40:
        raise DomainError("depth must be in [1, 40]")
    times = [0.0]
    values = [0.0]
    for n in range(depth):
        w_n = 1.0 - 3.0 / 2.0 ** (n + 2)
        r_next = 1.0 - 1.0 / 2.0 ** (n + 1)
        times.extend([w_n, r_next])
        values.extend([c_target * math.sqrt(3.0 / 2.0 ** (n + 2)), 0.0])
    if times[-1] < 1.0:
        times.append(1.0)
        values.append(0.0)
    return SampledDriving(np.array(times), np.array(values), LINEAR)
