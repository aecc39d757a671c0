"""Adaptive embedded Runge-Kutta integration with exact integrating factors.

The Dormand-Prince 5(4) pair advances y' = L(t) y + N(t, y) where the
stiff diagonal part L admits an exact propagator supplied by the caller
as ``decay(t0, t1) -> factor`` (elementwise, |factor| <= 1 for
dissipative L).  Stage states are reconstructed with forward decay
factors only, so nothing overflows no matter how stiff L grows:

    y_i     = E(t, t+c_i h) y_n + h sum_j a_ij E(t+c_j h, t+c_i h) N_j
    y_{n+1} = stage 7 (c_7 = 1, a_7j = b_j)
    err     = h sum_j (b_j - bhat_j) E(t+c_j h, t+h) N_j

With ``decay=None`` this reduces to the plain explicit DP45 pair, whose
stable horizon on the mode equations is limited by nu*p(t)*h <~ 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, IntegrationError

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
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_BHAT = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                  -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class IVPResult:
    t: float
    y: np.ndarray
    n_steps: int = 0
    n_rejected: int = 0
    sample_t: list = field(default_factory=list)
    sample_y: list = field(default_factory=list)


def solve_ifrk45(rhs, t0: float, y0: np.ndarray, t_end: float, rtol: float,
                 atol: float = 0.0, decay=None, sample_times=None,
                 record_steps: bool = False, h0: float | None = None,
                 max_step: float = math.inf) -> IVPResult:
    """Integrate to t_end; optionally record at sample_times (hit exactly).

    ``rhs(t, y)`` must exclude the part handled by ``decay``.  Raises
    IntegrationError with the time reached if the step size underflows.
    rtol bounds the delivered drift of the solution: accumulation over a
    run inflates per-step errors by an order of magnitude, so the
    per-step acceptance test runs at rtol/8.
    """
    if t_end <= t0:
        raise ConfigError("t_end must exceed t0")
    rtol = rtol / 8.0
    y = np.array(y0, dtype=np.complex128, copy=True)
    t = float(t0)
    res = IVPResult(t=t, y=y)
    samples = None
    if sample_times is not None:
        samples = [float(s) for s in sample_times if t0 <= s <= t_end]
        samples.sort()
    isample = 0
    if samples and abs(samples[0] - t0) < 1e-14:
        res.sample_t.append(t0)
        res.sample_y.append(y.copy())
        isample = 1
    if record_steps:
        res.sample_t.append(t0)
        res.sample_y.append(y.copy())

    h = h0 if h0 is not None else min(max_step, (t_end - t0) / 100.0, 0.1)
    ones = np.ones_like(y, dtype=float)

    def efac(a: float, b: float):
        if decay is None or a == b:
            return ones
        return decay(a, b)

    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        h = min(h, t_end - t, max_step)
        if samples and isample < len(samples):
            h = min(h, samples[isample] - t) if samples[isample] > t + 1e-14 else h
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(
                f"step size underflow at t = {t:.6g}", t_reached=t)
        ts = t + _C * h
        k = []
        for i in range(7):
            acc = efac(t, ts[i]) * y
            for j in range(i):
                aij = _A[i][j]
                if aij != 0.0:
                    acc = acc + (h * aij) * (efac(ts[j], ts[i]) * k[j])
            k.append(rhs(ts[i], acc) if i < 6 else None)
            if i == 6:
                y_new = acc
        err = np.zeros_like(y)
        for j in range(6):
            d = _B[j] - _BHAT[j]
            if d != 0.0:
                err = err + (h * d) * (efac(ts[j], t + h) * k[j])
        # stage 7 of the error estimate needs N(t+h, y_new)
        k7 = rhs(t + h, y_new)
        err = err + (h * (_B[6] - _BHAT[6])) * k7
        # error measured in max norm against the system scale: components
        # that decay to nothing are held to absolute, not relative, accuracy
        sys_scale = max(float(np.max(np.abs(y))), float(np.max(np.abs(y_new))), 1e-300)
        sc = atol + rtol * sys_scale
        enorm = float(np.max(np.abs(err))) / sc if y.size else 0.0
        if enorm <= 1.0:
            t = t + h
            y = y_new
            res.n_steps += 1
            if record_steps:
                res.sample_t.append(t)
                res.sample_y.append(y.copy())
            if samples:
                while isample < len(samples) and samples[isample] <= t + 1e-12 * max(1.0, t):
                    res.sample_t.append(samples[isample])
                    res.sample_y.append(y.copy())
                    isample += 1
        else:
            res.n_rejected += 1
        fac = 0.9 * enorm ** -0.2 if enorm > 0 else 5.0
        h = h * min(5.0, max(0.2, fac))
    # flush samples that coincide with t_end up to rounding
    if samples:
        while isample < len(samples) and samples[isample] <= t + 1e-9 * max(1.0, t):
            res.sample_t.append(samples[isample])
            res.sample_y.append(y.copy())
            isample += 1
        if isample < len(samples):
            raise IntegrationError(
                f"integration ended at t = {t:.6g} before sample "
                f"{samples[isample]:.6g}", t_reached=t)
    res.t = t
    res.y = y
    return res
