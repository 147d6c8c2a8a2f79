"""Vectorized NumPy implementations of the hot numeric kernels.

This is the fallback backend; ``greenpolar._core._fastcore`` provides the
same surface compiled with Cython.  All functions take C-contiguous float64
arrays and are pure.
"""

from __future__ import annotations

import numpy as np

# cap on the size of intermediate (targets x sources) blocks
_BLOCK = 1 << 22


def _dist_block(targets: np.ndarray, points: np.ndarray) -> np.ndarray:
    diff = targets[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def riesz_sum(targets: np.ndarray, points: np.ndarray, weights: np.ndarray,
              exponent: float) -> np.ndarray:
    """sum_i w_i * |x - y_i|**exponent for each target x (exponent < 0).

    A zero distance with positive weight contributes +inf.
    """
    m, p = targets.shape[0], points.shape[0]
    out = np.empty(m)
    step = max(1, _BLOCK // max(p, 1))
    for lo in range(0, m, step):
        hi = min(lo + step, m)
        d = _dist_block(targets[lo:hi], points)
        with np.errstate(divide="ignore"):
            vals = d ** exponent
        out[lo:hi] = vals @ weights
    return out


def spacetime_heat_sum(targets: np.ndarray, points: np.ndarray,
                       weights: np.ndarray, n: int, scale: float) -> np.ndarray:
    """Potentials of weighted space-time atoms under the heat transition.

    Atom (y, s) contributes w * scale * dt**(-n/2) * exp(-|x-y|^2/(4 dt))
    at target (x, r) with dt = r - s, and 0 when dt <= 0.
    """
    m, p = targets.shape[0], points.shape[0]
    out = np.empty(m)
    step = max(1, _BLOCK // max(p, 1))
    for lo in range(0, m, step):
        hi = min(lo + step, m)
        blk = targets[lo:hi]
        dt = blk[:, None, -1] - points[None, :, -1]
        diff = blk[:, None, :-1] - points[None, :, :-1]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        pos = dt > 0.0
        dt_safe = np.where(pos, dt, 1.0)
        vals = scale * dt_safe ** (-0.5 * n) * np.exp(-d2 / (4.0 * dt_safe))
        vals[~pos] = 0.0
        out[lo:hi] = vals @ weights
    return out


def spacetime_cauchy_sum(targets: np.ndarray, points: np.ndarray,
                         weights: np.ndarray, n: int, cn: float) -> np.ndarray:
    """Same contract as spacetime_heat_sum for the 1-stable transition."""
    m, p = targets.shape[0], points.shape[0]
    out = np.empty(m)
    step = max(1, _BLOCK // max(p, 1))
    for lo in range(0, m, step):
        hi = min(lo + step, m)
        blk = targets[lo:hi]
        dt = blk[:, None, -1] - points[None, :, -1]
        diff = blk[:, None, :-1] - points[None, :, :-1]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        pos = dt > 0.0
        dt_safe = np.where(pos, dt, 1.0)
        vals = cn * dt_safe * (dt_safe * dt_safe + d2) ** (-0.5 * (n + 1))
        vals[~pos] = 0.0
        out[lo:hi] = vals @ weights
    return out


def metric_ball_mask(points: np.ndarray, center: np.ndarray,
                     radius: float) -> np.ndarray:
    """Strict membership |p - center| < radius."""
    diff = points - center
    return np.einsum("ij,ij->i", diff, diff) < radius * radius


def box_mask(points: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Closed-box membership lo <= p <= hi, all axes."""
    return np.all((points >= lo) & (points <= hi), axis=1)


def heat_ball_mask(points: np.ndarray, center: np.ndarray, n: int,
                   u: float) -> np.ndarray:
    """Strict membership in the heat ball below `center` with time extent u.

    A point (y, tau) belongs iff s = center_time - tau lies in (0, u) and
    |y - center_space|^2 < 2 n s log(u / s).
    """
    s = center[-1] - points[:, -1]
    diff = points[:, :-1] - center[:-1]
    d2 = np.einsum("ij,ij->i", diff, diff)
    ok = (s > 0.0) & (s < u)
    s_safe = np.where(ok, s, 0.5 * u)
    bound = 2.0 * n * s_safe * np.log(u / s_safe)
    return ok & (d2 < bound)


def cylinder_mask(points: np.ndarray, center: np.ndarray, radius: float,
                  beta: float) -> np.ndarray:
    """Strict membership: spatial distance < radius, |dt| < radius**beta."""
    diff = points[:, :-1] - center[:-1]
    d2 = np.einsum("ij,ij->i", diff, diff)
    dt = np.abs(points[:, -1] - center[-1])
    return (d2 < radius * radius) & (dt < radius ** beta)
