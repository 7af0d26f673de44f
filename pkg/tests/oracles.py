"""Independent brute-force references used by the tests.

Nothing here imports the package's stabbing or interval code; every oracle
works from endpoint enumeration or dense residual evaluation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi


def linear_stab_oracle(intervals) -> int:
    """Max number of distinct owners covering one point; closed intervals.

    The optimum of a union of closed intervals is attained at some left
    endpoint, so trying all of them is exhaustive.
    """
    best = 0
    for lo, _, _ in intervals:
        owners = {o for a, b, o in intervals if a <= lo <= b}
        best = max(best, len(owners))
    return best


def _on_arc(theta, start, end) -> bool:
    t = theta % TWO_PI
    if start > end:
        return t >= start or t <= end
    if end - start >= TWO_PI:
        return True
    s = start % TWO_PI
    e = s + (end - start)
    return s <= t <= e or s <= t + TWO_PI <= e


def circular_stab_oracle(arcs) -> int:
    """Same as :func:`linear_stab_oracle` on the circle; arcs ``(start, end, owner)``
    with ``start > end`` wrapping through zero."""
    if not arcs:
        return 0
    best = 0
    for start, _, _ in arcs:
        owners = {o for a, b, o in arcs if _on_arc(start, a, b)}
        best = max(best, len(owners))
    return best


@njit(cache=True)
def surface_grid_max(center, radius, Y, nx, xi, dz, nphi):
    """Largest number of shells ``| |y_i - t| - nx_i | <= xi`` through one
    grid point ``t`` of the sphere (height step ``dz``, ``nphi`` azimuths)."""
    best = 0
    nz = int(np.floor(2.0 * radius / dz)) + 1
    ang = np.arange(nphi) * (2.0 * np.pi / nphi)
    cphi = np.cos(ang)
    sphi = np.sin(ang)
    for a in range(nz + 1):
        z = min(-radius + a * dz, radius)
        s = np.sqrt(max(radius * radius - z * z, 0.0))
        tz = center[2] + z
        for b in range(nphi):
            tx = center[0] + s * cphi[b]
            ty = center[1] + s * sphi[b]
            cnt = 0
            for i in range(Y.shape[0]):
                d = np.sqrt((Y[i, 0] - tx) ** 2 + (Y[i, 1] - ty) ** 2 + (Y[i, 2] - tz) ** 2)
                if abs(d - nx[i]) <= xi:
                    cnt += 1
            if cnt > best:
                best = cnt
    return best


def dense_angles(n: int = 4096) -> np.ndarray:
    return np.arange(n) * (TWO_PI / n)


def in_pieces(theta, pieces) -> np.ndarray:
    """Membership of each angle in a union of ``[lo, hi]`` pieces, testing
    the angle and its 2π shifts so unwrapped pieces are handled too."""
    theta = np.asarray(theta)
    hit = np.zeros(theta.shape, dtype=bool)
    for lo, hi in pieces:
        for shift in (-TWO_PI, 0.0, TWO_PI):
            t = theta + shift
            hit |= (t >= lo) & (t <= hi)
    return hit


def rotation_about(r, theta) -> np.ndarray:
    """Rotation matrix by exponentiating the skew matrix (independent of the
    package's closed form)."""
    from scipy.linalg import expm

    r = np.asarray(r, dtype=np.float64)
    K = np.array([[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]])
    return expm(theta * K)


def random_unit(rng, n=None):
    v = rng.normal(size=(3,) if n is None else (n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def rotate_about(X, r, theta):
    """Rotate rows of ``X`` about unit ``r`` by each angle in ``theta``;
    returns (len(theta), len(X), 3).  Written out from the vector form of
    the rotation (parallel part kept, perpendicular part turned)."""
    X = np.atleast_2d(X)
    theta = np.atleast_1d(theta)
    par = (X @ r)[:, None] * r
    perp = X - par
    cross = np.cross(r, X)
    c = np.cos(theta)[:, None, None]
    s = np.sin(theta)[:, None, None]
    return par[None] + c * perp[None] + s * cross[None]
