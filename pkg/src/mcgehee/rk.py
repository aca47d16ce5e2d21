"""Adaptive Dormand-Prince 5(4) integration with PI step control.

The solver is deliberately small: one explicit embedded pair, RMS error
norm against ``atol + rtol*|y|``, a proportional-integral controller on the
step size, and cubic Hermite interpolation between accepted steps (locally
fourth-order, matching the sampling accuracy we need).

A right-hand side may raise DomainError to signal that a stage left the
admissible region; the step is then retried with a smaller h.  When the
step size underflows the run ends gracefully with a termination reason,
unless not even one step was accepted, which raises instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, LeftDomainError, StepUnderflowError

__all__ = ["RawSolution", "solve", "hermite_sample"]

# Dormand-Prince coefficients.  The last row of A equals the 5th-order
# weights, so the final stage of an accepted step is the first stage of the
# next one (FSAL).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th- and embedded 4th-order weights
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_K_I = 0.7 / 5.0   # integral gain on the current error
_K_P = 0.4 / 5.0   # proportional gain on the previous error


@dataclass
class RawSolution:
    ts: np.ndarray          # accepted nodes, monotone in integration direction
    ys: np.ndarray          # states at the nodes, shape (n, dim)
    fs: np.ndarray          # derivatives at the nodes (for dense output)
    reason: str             # "span_end" | "step_underflow" | "left_domain" | custom
    n_accepted: int
    n_rejected: int

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    @property
    def y_end(self) -> np.ndarray:
        return self.ys[-1]

    def sample(self, tq) -> np.ndarray:
        return hermite_sample(self.ts, self.ys, self.fs, tq)


def hermite_sample(ts: np.ndarray, ys: np.ndarray, fs: np.ndarray, tq) -> np.ndarray:
    """Cubic Hermite interpolation of the solution at query times ``tq``.

    Queries must lie inside the integrated span; returns shape (len(tq), dim).
    """
    tq_arr = np.atleast_1d(np.asarray(tq, dtype=float))
    direction = 1.0 if ts[-1] >= ts[0] else -1.0
    s = direction * ts
    lo, hi = s[0], s[-1]
    q = direction * tq_arr
    if np.any(q < lo - 1e-12) or np.any(q > hi + 1e-12):
        raise ValueError("dense-output query outside the integrated span")
    idx = np.clip(np.searchsorted(s, q, side="right") - 1, 0, len(ts) - 2)
    t0, t1 = ts[idx], ts[idx + 1]
    h = t1 - t0
    x = np.where(h != 0.0, (tq_arr - t0) / np.where(h == 0.0, 1.0, h), 0.0)
    x = x[:, None]
    h00 = (1 + 2 * x) * (1 - x) ** 2
    h10 = x * (1 - x) ** 2
    h01 = x**2 * (3 - 2 * x)
    h11 = x**2 * (x - 1)
    hcol = h[:, None]
    return h00 * ys[idx] + h10 * hcol * fs[idx] + h01 * ys[idx + 1] + h11 * hcol * fs[idx + 1]


def _initial_step(f, t0, y0, f0, t1, rtol, atol, max_step):
    scale = atol + rtol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    direction = math.copysign(1.0, t1 - t0)
    h0 = min(h0, abs(t1 - t0), max_step)
    try:
        f1 = f(t0 + direction * h0, y0 + direction * h0 * f0)
        d2 = math.sqrt(float(np.mean(((f1 - f0) / scale) ** 2))) / h0
    except DomainError:
        return 0.01 * h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, abs(t1 - t0), max_step)


def solve(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: Sequence[float],
    t1: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_step: float = math.pi / 8.0,
    first_step: float | None = None,
    stop: Callable[[float, np.ndarray, np.ndarray], str | None] | None = None,
    postprocess: Callable[[float, np.ndarray], np.ndarray] | None = None,
) -> RawSolution:
    """Integrate ``dy/dt = f(t, y)`` from t0 to t1 (either direction).

    ``stop`` is evaluated at every accepted node and may return a custom
    termination reason to end the run early.  ``postprocess`` maps each
    accepted state before it is recorded (e.g. projection onto an invariant
    set); it costs the FSAL reuse, since the derivative is re-evaluated at
    the adjusted point.
    """
    if t0 == t1:
        raise ValueError("empty integration span")
    y = np.asarray(y0, dtype=float)
    direction = math.copysign(1.0, t1 - t0)
    try:
        k0 = f(t0, y)
    except DomainError as err:
        raise LeftDomainError(f"initial state is not integrable: {err}") from err

    h = first_step if first_step is not None else _initial_step(
        f, t0, y, k0, t1, rtol, atol, max_step
    )
    h = min(abs(h), abs(t1 - t0), max_step)

    ts, ys, fs = [t0], [y.copy()], [k0.copy()]
    reason = None
    err_prev = 1.0
    n_acc = n_rej = 0
    t = t0

    if stop is not None:
        early = stop(t, y, k0)
        if early:
            return RawSolution(np.array(ts), np.array(ys), np.array(fs), early, 0, 0)

    while reason is None:
        h_min = 16.0 * np.finfo(float).eps * max(abs(t), abs(t1), 1.0)
        if abs(t1 - t) <= h_min:
            reason = "span_end"
            break
        h = min(h, abs(t1 - t))
        domain_hit = False
        while True:
            if h < h_min:
                reason = "left_domain" if domain_hit else "step_underflow"
                break
            hs = direction * h
            k = [k0]
            try:
                for i in range(1, 7):
                    yi = y + hs * (np.stack(k, axis=1) @ _A[i])
                    if not np.all(np.isfinite(yi)):
                        raise DomainError("non-finite stage value")
                    k.append(f(t + _C[i] * hs, yi))
            except (DomainError, OverflowError):
                domain_hit = True
                n_rej += 1
                h *= 0.5
                continue
            kmat = np.stack(k, axis=1)
            y_new = y + hs * (kmat @ _B)
            err_vec = hs * (kmat @ _E)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
            if not math.isfinite(err):
                domain_hit = True
                n_rej += 1
                h *= 0.5
                continue
            if err <= 1.0:
                break
            n_rej += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-_K_I))
        if reason is not None:
            break

        t = t + hs
        y = y_new
        if postprocess is not None:
            y = postprocess(t, y)
            k0 = np.asarray(f(t, y), dtype=float)
        else:
            k0 = k[6]  # FSAL: last stage is f(t, y_new)
        ts.append(t)
        ys.append(y.copy())
        fs.append(k0.copy())
        n_acc += 1

        if err == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = _SAFETY * err ** (-_K_I) * err_prev ** _K_P
        h = min(h * min(_MAX_FACTOR, max(_MIN_FACTOR, factor)), max_step)
        err_prev = max(err, 1e-4)  # keep the PI memory term well-conditioned

        if stop is not None:
            custom = stop(t, y, k0)
            if custom:
                reason = custom
                break
        if direction * (t1 - t) <= 1e-14 * max(abs(t1), 1.0):
            reason = "span_end"
            break

    if n_acc == 0:
        if reason == "left_domain":
            raise LeftDomainError(f"no progress from t={t0}: state leaves the domain")
        if reason == "step_underflow":
            raise StepUnderflowError(f"step size underflow at t={t0}")
    return RawSolution(
        np.array(ts), np.array(ys), np.array(fs), reason, n_acc, n_rej
    )
