"""Hot numeric kernels with an optional numba fast path.

The inverse elementary map f(w) = (w + a)^(1-alpha) * (w - b)^alpha is
evaluated as (w + a) * ((w - b)/(w + a))^alpha, which needs a single complex
power and keeps the branch continuous on the closed upper half-plane
(the Moebius quotient maps H into H, so the principal power is the branch
whose image stays in H).

Set LOEWNER_NO_NUMBA=1 to force the numpy fallback.
"""

from __future__ import annotations

import os

import numpy as np

_HAVE_NUMBA = False
if os.environ.get("LOEWNER_NO_NUMBA", "") != "1":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except Exception:  # pragma: no cover - numba is an optional accelerator
        _HAVE_NUMBA = False


def _inv_map_numpy(w, base, a, b, alpha):
    """Inverse elementary map (H -> H minus slit) applied to an array."""
    ww = w - base
    wa = ww + a
    # wa == 0 is the left prime end of the base; the quotient would be inf.
    tiny = wa == 0
    if np.any(tiny):
        wa = np.where(tiny, 1.0, wa)
    if alpha == 0.5:
        f = np.sqrt(wa * (ww - b))
        flip = (f.imag < 0.0) | ((f.imag == 0.0) & (ww.real < 0.0))
        f = np.where(flip, -f, f)
    else:
        f = wa * np.power((ww - b) / wa, alpha)
    if np.any(tiny):
        f = np.where(tiny, 0.0, f)
    return f + base


def _reverse_accumulate_numpy(base, a, b, alpha, seeds, starts, out):
    """out[k] = f_0(f_1(... f_{starts[k]-1}(seeds[k]) ...)).

    ``starts`` must be nondecreasing. Maps are indexed 0..M-1 in push order;
    entry k receives the inverses of maps starts[k]-1 down to 0.
    """
    m = len(base)
    n = len(seeds)
    out[:] = seeds
    lo = n  # first live entry; entries join as their start index is reached
    for i in range(m - 1, -1, -1):
        while lo > 0 and starts[lo - 1] > i:
            lo -= 1
        if lo >= n:
            continue
        out[lo:] = _inv_map_numpy(out[lo:], base[i], a[i], b[i], alpha[i])
    return out


def _forward_newton_numpy(zeta, guess, a, b, alpha, s, wstar, tol, max_iter=36):
    """Damped Newton for f(w) = zeta; returns (w, converged mask)."""
    w = np.array(guess, dtype=np.complex128, copy=True)
    w = np.where(w.imag < 0.0, np.conj(w), w)
    scale = s + np.abs(zeta)
    floor = 1e-14 * s
    converged = np.zeros(zeta.shape, dtype=bool)
    for _ in range(max_iter):
        wa = w + a
        wb = w - b
        wa = np.where(np.abs(wa) < floor, floor, wa)
        wb = np.where(np.abs(wb) < floor, floor, wb)
        f = wa * np.power(wb / wa, alpha)
        F = f - zeta
        converged = np.abs(F) <= tol * scale
        if converged.all():
            break
        fp = f * ((1.0 - alpha) / wa + alpha / wb)
        fp = np.where(np.abs(fp) < 1e-300, 1e-300, fp)
        step = F / fp
        maxstep = 0.6 * (np.abs(w - wstar) + 0.25 * s)
        mag = np.abs(step)
        step = np.where(mag > maxstep, step * (maxstep / np.maximum(mag, 1e-300)), step)
        w_new = w - np.where(converged, 0.0, step)
        w_new = np.where(w_new.imag < 0.0, w_new.real + 0j, w_new)
        w = w_new
    return w, converged


if _HAVE_NUMBA:

    @njit(cache=True)
    def _newton_one(target, w0, a, b, alpha, s, wstar, tol, max_iter):
        floor = 1e-14 * s
        wk = w0
        if wk.imag < 0.0:
            wk = np.conj(wk)
        scale = s + abs(target)
        for _ in range(max_iter):
            wa = wk + a
            wb = wk - b
            if abs(wa) < floor:
                wa = complex(floor, 0.0)
            if abs(wb) < floor:
                wb = complex(floor, 0.0)
            f = wa * (wb / wa) ** alpha
            F = f - target
            if abs(F) <= tol * scale:
                return wk, True
            fp = f * ((1.0 - alpha) / wa + alpha / wb)
            if abs(fp) < 1e-300:
                fp = complex(1e-300, 0.0)
            step = F / fp
            maxstep = 0.6 * (abs(wk - wstar) + 0.25 * s)
            mag = abs(step)
            if mag > maxstep:
                step *= maxstep / mag
            wk = wk - step
            if wk.imag < 0.0:
                wk = complex(wk.real, 0.0)
            if abs(step) <= 4e-16 * (abs(wk) + s):
                # stagnation at machine precision in w-space: near the base
                # the f-residual is ill-conditioned, the preimage is not
                return wk, True
        return wk, False

    @njit(cache=True)
    def _near_base_fixed_point(target, a, b, alpha, s, tol):
        """Preimage of a small target via the power fixed point.

        Right side (arg target < alpha*pi): w = b + u with
        f = u^alpha (u+s)^(1-alpha); left side mirrors with alpha -> 1-alpha.
        Contraction factor ~ u/(u+s), tiny near the base.
        """
        api = alpha * np.pi
        ang = np.angle(target)
        if ang < 0.0:
            ang = 0.0
        right = ang <= api
        if right:
            al = alpha
            tgt = target
        else:
            al = 1.0 - alpha
            tgt = -np.conj(target)
        u = (tgt / s ** (1.0 - al)) ** (1.0 / al)
        for _ in range(60):
            u_new = (tgt / (u + s) ** (1.0 - al)) ** (1.0 / al)
            if abs(u_new - u) <= 0.25 * tol * s:
                u = u_new
                break
            u = u_new
        if right:
            return b + u
        # mirror symmetry: left side of (a, b, alpha) is the reflected right
        # side of (b, a, 1-alpha)
        return -a - np.conj(u)

    @njit(cache=True)
    def _forward_newton_numba(zeta, guess, a, b, alpha, s, wstar, tol, max_iter):
        n = len(zeta)
        w = np.empty(n, dtype=np.complex128)
        ok = np.zeros(n, dtype=np.bool_)
        duration = alpha * (1.0 - alpha) * s * s / 4.0
        tip_len = s * np.exp((1.0 - alpha) * np.log(1.0 - alpha) + alpha * np.log(alpha))
        tip = tip_len * complex(np.cos(alpha * np.pi), np.sin(alpha * np.pi))
        f2 = -tip / (s * s * alpha * (1.0 - alpha))  # f'' at the critical point
        for k in range(n):
            zk = zeta[k]
            # pick a starting point by region; plain Newton stalls at the
            # base (f' = inf) and at the tip (f' = 0)
            if abs(zk) < 0.35 * s:
                w0 = _near_base_fixed_point(zk, a, b, alpha, s, tol)
            elif abs(zk - tip) < 0.5 * s:
                w0 = wstar + np.sqrt(2.0 * (zk - tip) / f2)
                if w0.imag < 0.0:
                    w0 = np.conj(w0)
            else:
                w0 = guess[k]
            wk, good = _newton_one(zk, w0, a, b, alpha, s, wstar, tol, max_iter)
            if not good and abs(zk - tip) < 4.0 * s:
                w0 = wstar + np.sqrt(2.0 * (zk - tip) / f2)
                if w0.imag < 0.0:
                    w0 = np.conj(w0)
                wk, good = _newton_one(zk, w0, a, b, alpha, s, wstar, tol, max_iter)
                if not good:
                    w0 = wstar - np.sqrt(2.0 * (zk - tip) / f2)
                    if w0.imag < 0.0:
                        w0 = np.conj(w0)
                    wk, good = _newton_one(zk, w0, a, b, alpha, s, wstar, tol, max_iter)
            if not good and abs(zk) > 0.0:
                # radial continuation from far away; the slit is star-shaped
                # from the base so scaling paths stay inside the domain
                m0 = max(8.0, 12.0 * s / abs(zk))
                n_path = 24
                z0 = zk * m0
                wk = z0 + 2.0 * duration / z0
                good = True
                for j in range(n_path, -1, -1):
                    target = zk * m0 ** (j / n_path)
                    wk, good = _newton_one(target, wk, a, b, alpha, s, wstar, tol, 25)
            w[k] = wk
            ok[k] = good
        return w, ok


def forward_newton(zeta, guess, a, b, alpha, s, wstar, tol, max_iter=36):
    """Dispatch the elementwise forward Newton solve."""
    zeta = np.ascontiguousarray(zeta, dtype=np.complex128)
    guess = np.ascontiguousarray(guess, dtype=np.complex128)
    if _HAVE_NUMBA:
        return _forward_newton_numba(zeta, guess, float(a), float(b), float(alpha),
                                     float(s), float(wstar), float(tol), max_iter)
    return _forward_newton_numpy(zeta, guess, a, b, alpha, s, wstar, tol, max_iter)


if _HAVE_NUMBA:

    @njit(cache=True)
    def _reverse_accumulate_numba(base, a, b, alpha, seeds, starts, out):
        m = len(base)
        n = len(seeds)
        for k in range(n):
            out[k] = seeds[k]
        lo = n
        for i in range(m - 1, -1, -1):
            while lo > 0 and starts[lo - 1] > i:
                lo -= 1
            if lo >= n:
                continue
            ba = base[i]
            ai = a[i]
            bi = b[i]
            al = alpha[i]
            if al == 0.5:
                for j in range(lo, n):
                    ww = out[j] - ba
                    f = np.sqrt((ww + ai) * (ww - bi))
                    if f.imag < 0.0 or (f.imag == 0.0 and ww.real < 0.0):
                        f = -f
                    out[j] = f + ba
            else:
                for j in range(lo, n):
                    ww = out[j] - ba
                    wa = ww + ai
                    if wa == 0:
                        out[j] = ba
                    else:
                        out[j] = wa * ((ww - bi) / wa) ** al + ba
        return out


def reverse_accumulate(base, a, b, alpha, seeds, starts):
    """Dispatch the reverse accumulation to numba when available."""
    out = np.empty(len(seeds), dtype=np.complex128)
    base = np.ascontiguousarray(base, dtype=np.float64)
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    alpha = np.ascontiguousarray(alpha, dtype=np.float64)
    seeds = np.ascontiguousarray(seeds, dtype=np.complex128)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    if _HAVE_NUMBA:
        return _reverse_accumulate_numba(base, a, b, alpha, seeds, starts, out)
    return _reverse_accumulate_numpy(base, a, b, alpha, seeds, starts, out)


def inverse_map_array(w, base, a, b, alpha):
    """Single inverse elementary map on an array (numpy path)."""
    w = np.asarray(w, dtype=np.complex128)
    return _inv_map_numpy(w, base, a, b, alpha)
