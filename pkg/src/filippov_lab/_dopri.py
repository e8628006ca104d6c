"""Dormand-Prince 5(4) with PI step control and cubic Hermite dense output."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import MaxStepsExceeded, StepSizeUnderflow

# Butcher tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4

SAFE = 0.9
FAC_MIN = 0.2  # step may shrink to a fifth
FAC_MAX = 10.0
BETA = 0.04
EXPO = 0.2 - 0.75 * BETA


@dataclass
class Stats:
    nfev: int = 0
    naccept: int = 0
    nreject: int = 0


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    stats: Stats = field(default_factory=Stats)


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    # increment form: a stationary state (y1 == y0, f == 0) is reproduced exactly
    h01 = s * s * (3 - 2 * s)
    h10 = s * (1 - s) ** 2
    h11 = s * s * (s - 1)
    return y0 + h01 * (y1 - y0) + h * (h10 * f0 + h11 * f1)


def _partial(exc, ts, ys):
    """Attach the samples produced so far to a solver error."""
    exc.partial_t = np.array(ts)
    exc.partial_y = np.array(ys).reshape(len(ts), -1)
    return exc


def _initial_step(f, t0, y0, f0, rtol, atol, t_span):
    sc = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / sc) ** 2))
    d1 = np.sqrt(np.mean((f0 / sc) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / sc) ** 2)) / h0
    m = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if m <= 1e-15 else (0.01 / m) ** 0.2
    return min(100 * h0, h1, t_span)


def solve(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0,
    t_end: float,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    t_eval=None,
    max_steps: int = 500_000,
    h_min_rel: float = 1e-14,
) -> Solution:
    """Integrate y' = f(t, y) from t0 to t_end.

    Without ``t_eval`` the accepted step points are returned; otherwise the
    dense output is sampled there.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    span = float(t_end) - t
    stats = Stats()
    fy = np.asarray(f(t, y), float)
    stats.nfev += 1
    if span <= 0:
        raise ValueError("t_end must exceed t0")
    h = _initial_step(f, t, y, fy, rtol, atol, span)
    stats.nfev += 1
    err_old = 1e-4

    if t_eval is None:
        ts, ys = [t], [y.copy()]
    else:
        t_eval = np.asarray(t_eval, float)
        ts, ys = [], []
        k_eval = 0
        while k_eval < len(t_eval) and t_eval[k_eval] <= t:
            ts.append(t_eval[k_eval])
            ys.append(y.copy())
            k_eval += 1

    K = np.empty((7, y.size))
    last_rejected = False
    while t < t_end:
        if stats.naccept + stats.nreject >= max_steps:
            raise _partial(MaxStepsExceeded(f"max_steps={max_steps} reached at t={t}", t, y.copy()), ts, ys)
        if h < h_min_rel * max(1.0, abs(t)):
            raise _partial(StepSizeUnderflow(f"step size {h:.3e} underflow at t={t}", t, y.copy()), ts, ys)
        if t + h > t_end:
            h = t_end - t
        K[0] = fy
        for s in range(1, 7):
            K[s] = f(t + C[s] * h, y + h * (np.asarray(A[s]) @ K[:s]))
        stats.nfev += 6
        y_new = y + h * (B5[:6] @ K[:6])
        f_new = K[6].copy()
        err_vec = h * (E @ K)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / sc) ** 2)))
        if not np.isfinite(err):
            h *= FAC_MIN
            stats.nreject += 1
            last_rejected = True
            continue
        if err <= 1.0:
            # PI controller: proportional on err, integral on the previous err
            fac = SAFE * err_old**BETA / max(err, 1e-10) ** EXPO
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            if last_rejected:
                fac = min(fac, 1.0)
            err_old = max(err, 1e-4)
            t_new = t + h
            if t_eval is None:
                ts.append(t_new)
                ys.append(y_new.copy())
            else:
                while k_eval < len(t_eval) and t_eval[k_eval] <= t_new:
                    te = t_eval[k_eval]
                    ys.append(y_new.copy() if te == t_new else _hermite(t, y, fy, t_new, y_new, f_new, te))
                    ts.append(te)
                    k_eval += 1
            t, y, fy = t_new, y_new, f_new
            stats.naccept += 1
            last_rejected = False
            h *= fac
        else:
            h *= max(FAC_MIN, SAFE / err**EXPO)
            stats.nreject += 1
            last_rejected = True
    return Solution(np.array(ts), np.array(ys).reshape(len(ts), -1), stats)
