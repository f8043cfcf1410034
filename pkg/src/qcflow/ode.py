"""Dormand-Prince 5(4) integrator with PI step control.

Works on real or complex state vectors, lands exactly on requested output
times and can locate a terminal event ``event(t, y) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import SolverError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

SAFETY = 0.9
PI_ALPHA = 0.7 / 5
PI_BETA = 0.4 / 5
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


def dp_step(rhs, t, y, h, k1=None):
    """One Dormand-Prince step: (y5, error estimate, stages)."""
    k = [k1 if k1 is not None else rhs(t, y)]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(rhs(t + _C[i] * h, yi))
    y5 = y + h * sum(b * kj for b, kj in zip(_B5, k) if b != 0.0)
    err = h * sum(e * kj for e, kj in zip(_E, k))
    return y5, err, k


@dataclass
class OdeResult:
    t: np.ndarray
    y: np.ndarray
    status: str = "success"
    event_time: float | None = None
    event_state: np.ndarray | None = None
    steps: int = 0
    rejected: int = 0
    nfev: int = 0
    message: str = ""
    step_times: list = field(default_factory=list)


def integrate(rhs, t0: float, y0, t_end: float, *, t_eval=None, rtol: float = 1e-10,
              atol: float = 1e-12, h0: float | None = None, h_max: float | None = None,
              max_steps: int = 200000, event=None, callback=None) -> OdeResult:
    """Integrate y' = rhs(t, y) from t0 to t_end (forward in time).

    ``t_eval`` lists output times in (t0, t_end]; the step is shortened so
    each one is hit exactly.  ``event(t, y)`` is a scalar function whose sign
    change stops the integration at its root.  ``callback(t, y)`` runs after
    every accepted step; it may raise to abort.
    """
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    outs = np.array(sorted(t_eval) if t_eval is not None else [t_end], dtype=float)
    outs = outs[outs > t0]
    ts, ys = [t0], [y.copy()]
    t = float(t0)
    nfev = 1
    k1 = rhs(t, y)
    scale0 = atol + rtol * np.abs(y)
    if h0 is None:
        d0 = np.sqrt(np.mean((np.abs(y) / scale0) ** 2))
        d1 = np.sqrt(np.mean((np.abs(k1) / scale0) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, t_end - t0)
    h = h0
    h_max = h_max or (t_end - t0)
    err_prev = 1.0
    steps = rejected = 0
    ev_prev = event(t, y) if event is not None else None
    oi = 0
    step_times = []
    while oi < outs.size:
        if steps + rejected > max_steps:
            raise SolverError("maximum number of steps exceeded", iterations=steps)
        target = outs[oi]
        h = min(h, h_max)
        hit = t + h >= target - 1e-14 * max(1.0, abs(target))
        h_try = target - t if hit else h
        y_new, err, k = dp_step(rhs, t, y, h_try, k1)
        nfev += 6
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        en = float(np.sqrt(np.mean((np.abs(err) / sc) ** 2)))
        if not np.all(np.isfinite(y_new)):
            en = np.inf
        if en <= 1.0:
            if event is not None:
                ev_new = event(t + h_try, y_new)
                if np.sign(ev_new) != np.sign(ev_prev) and ev_prev != 0.0:
                    def g(s):
                        if s == 0.0:
                            return ev_prev
                        return event(t + s, dp_step(rhs, t, y, s, k1)[0])
                    s = brentq(g, 0.0, h_try, xtol=1e-15, rtol=4 * np.finfo(float).eps)
                    y_ev = dp_step(rhs, t, y, s, k1)[0]
                    ts.append(t + s)
                    ys.append(y_ev)
                    return OdeResult(np.array(ts), np.array(ys), "event", t + s, y_ev,
                                     steps + 1, rejected, nfev, "event located", step_times)
                ev_prev = ev_new
            t = target if hit else t + h_try
            y = y_new
            k1 = k[6]
            steps += 1
            step_times.append(t)
            if callback is not None:
                callback(t, y)
            if hit:
                ts.append(t)
                ys.append(y.copy())
                oi += 1
            en = max(en, 1e-10)
            factor = SAFETY * en ** (-PI_ALPHA) * err_prev ** PI_BETA
            err_prev = en
            h_new = h_try * min(MAX_FACTOR, max(MIN_FACTOR, factor))
            # a step shortened to hit an output time says little about the next one
            h = max(h, h_new) if hit else h_new
        else:
            rejected += 1
            factor = SAFETY * en ** (-1.0 / 5.0) if np.isfinite(en) else MIN_FACTOR
            h = h_try * min(1.0, max(MIN_FACTOR, factor))
            if h < 1e-14 * max(1.0, abs(t)):
                raise SolverError(f"step size underflow at t={t:.6g}", iterations=steps)
    return OdeResult(np.array(ts), np.array(ys), "success", None, None, steps, rejected, nfev,
                     "", step_times)
