"""Stage III: rotation angle about a fixed axis, by one circular stabbing.

With ``t`` and the axis ``r`` fixed, ``R(θ) x_i`` travels on a circle around
``r``; the angles that keep it within ``xi`` of ``y_i - t`` form a single arc
centered on the angle that aligns the perpendicular components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (AxisAngle, ConsensusSet, Correspondence, CorrespondenceSet, NoAngle,
                   Stage, TWO_PI, rodrigues)
from .stabbing import cos_band, push_arc, stabbed_mask, sweep


@dataclass(frozen=True)
class AngleInterval:
    """Feasible angles ``[theta_lo, theta_hi]`` (unwrapped, ``theta_lo <= theta_hi``)."""

    theta_lo: float
    theta_hi: float
    owner: int

    @property
    def is_full(self) -> bool:
        return self.theta_hi - self.theta_lo >= TWO_PI


@njit(cache=True)
def _angle_arc(x, a, r, xi, out):
    """Write the feasible ``θ`` arc of one pair into ``out``; return 0 or 1."""
    xr = x[0] * r[0] + x[1] * r[1] + x[2] * r[2]
    ar = a[0] * r[0] + a[1] * r[1] + a[2] * r[2]
    xp = x - xr * r
    ap = a - ar * r
    nxp = np.sqrt(xp[0] ** 2 + xp[1] ** 2 + xp[2] ** 2)
    nap = np.sqrt(ap[0] ** 2 + ap[1] ** 2 + ap[2] ** 2)
    const = (ar - xr) ** 2 + nap * nap + nxp * nxp
    denom = 2.0 * nap * nxp
    if denom == 0.0:
        if const <= xi * xi:
            out[0, 0] = 0.0
            out[0, 1] = TWO_PI
            return 1
        return 0
    cr = np.array([xp[1] * ap[2] - xp[2] * ap[1],
                   xp[2] * ap[0] - xp[0] * ap[2],
                   xp[0] * ap[1] - xp[1] * ap[0]])
    sin_part = cr[0] * r[0] + cr[1] * r[1] + cr[2] * r[2]
    cos_part = xp[0] * ap[0] + xp[1] * ap[1] + xp[2] * ap[2]
    theta0 = np.arctan2(sin_part, cos_part)
    return cos_band(theta0, (const - xi * xi) / denom, np.inf, out)


@njit(cache=True)
def _angle_pieces(X, A, r, xi):
    M = X.shape[0]
    plo = np.empty(2 * M)
    phi = np.empty(2 * M)
    pown = np.empty(2 * M, np.int64)
    arcs = np.empty((2, 2))
    k = 0
    for i in range(M):
        na = _angle_arc(X[i], A[i], r, xi, arcs)
        for a in range(na):
            k = push_arc(arcs[a, 0], arcs[a, 1], i, plo, phi, pown, k)
    return plo[:k], phi[:k], pown[:k]


def angle_interval(c: Correspondence, t_prime, r_prime, xi: float) -> AngleInterval | None:
    """Angles ``θ`` with ``||y - t - R(θ) x|| <= xi``, or ``None`` if there
    are none.  A full-circle result has ``theta_hi - theta_lo == 2π``."""
    r = np.asarray(r_prime, dtype=np.float64)
    a = np.asarray(c.y, dtype=np.float64) - np.asarray(t_prime, dtype=np.float64)
    out = np.empty((2, 2))
    if _angle_arc(np.asarray(c.x, dtype=np.float64), a, r, xi, out) == 0:
        return None
    return AngleInterval(float(out[0, 0]), float(out[0, 1]), c.index)


def solve_stage3(I2: ConsensusSet, t_prime, r_prime, cset: CorrespondenceSet,
                 xi: float) -> tuple[float, ConsensusSet]:
    """Return ``(theta, I3)``, the globally best angle for the members of
    ``I2`` and the members it keeps.  ``theta`` sits at the middle of the
    best region so it is clear of every kept constraint's boundary."""
    members = np.asarray(I2.indices, dtype=np.int64)
    r = np.asarray(r_prime, dtype=np.float64)
    X = np.ascontiguousarray(cset.x[members])
    A = np.ascontiguousarray(cset.y[members] - np.asarray(t_prime, dtype=np.float64))
    plo, phi, pown = _angle_pieces(X, A, r, xi)
    if plo.size == 0:
        raise NoAngle("no member of the axis consensus admits any angle")
    x, count, end = sweep(plo, phi, pown, members.size)
    theta = 0.5 * (x + end)
    hit = stabbed_mask(plo, phi, pown, members.size, theta)
    return float(theta % TWO_PI), ConsensusSet(members[hit], Stage.ANGLE)


def assemble(r_prime, theta: float) -> np.ndarray:
    return rodrigues(AxisAngle(r_prime, theta))
