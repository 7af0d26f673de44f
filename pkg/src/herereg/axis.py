"""Stage II: rotation-axis search with the translation fixed.

A rotation leaves its own axis ``r`` unchanged, so an inlier must satisfy
``|(y_i - t - x_i)ᵀ r| <= xi`` regardless of the angle.  Each correspondence
therefore confines ``r`` to a girdle (band) of the unit sphere.  For every
sampled correspondence its girdle is sliced into ``n`` parallel circles, the
circles are clipped to the upper hemisphere, and the girdles of the other
correspondences cut each circle into arcs that are stabbed in one sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .compat import AffinityMatrix, PriorityTable, verified_candidates
from .core import (ConsensusSet, CorrespondenceSet, DegenerateAxis, PipelineConfig,
                   Stage, TWO_PI)
from .sampling import draw_samples
from .stabbing import cos_band, push_arc, sweep

MIN_DISPLACEMENT = 1e-9


@dataclass(frozen=True)
class AxisConstraint:
    """Girdle ``{r : |dᵀ r| <= xi_i}``; ``xi_i`` is capped at 1."""

    d: np.ndarray
    xi_i: float

    @classmethod
    def from_displacement(cls, v: np.ndarray, xi: float) -> "AxisConstraint":
        nv = float(np.linalg.norm(v))
        if nv < MIN_DISPLACEMENT:
            raise DegenerateAxis("zero relative displacement, girdle normal undefined")
        return cls(np.asarray(v, dtype=np.float64) / nv, min(xi / nv, 1.0))


def plane_basis(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal ``e1, e2`` spanning the plane normal to unit ``d``.

    Gram-Schmidt starts from the coordinate axis least aligned with ``d``.
    """
    e = np.zeros(3)
    e[int(np.argmin(np.abs(d)))] = 1.0
    e1 = e - (e @ d) * d
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(d, e1)


@dataclass(frozen=True)
class HalfCircle:
    """Circle ``{r : dᵀ r = offset, |r| = 1}`` restricted to ``r3 >= 0``,
    parameterized by its intrinsic angle ``u``."""

    d: np.ndarray
    offset: float
    e1: np.ndarray
    e2: np.ndarray

    @classmethod
    def make(cls, d: np.ndarray, offset: float) -> "HalfCircle":
        e1, e2 = plane_basis(np.asarray(d, dtype=np.float64))
        return cls(np.asarray(d, dtype=np.float64), float(offset), e1, e2)

    @property
    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        return self.e1, self.e2

    def point(self, u: float) -> np.ndarray:
        s = np.sqrt(max(1.0 - self.offset ** 2, 0.0))
        return self.offset * self.d + s * (np.cos(u) * self.e1 + np.sin(u) * self.e2)


def half_circle_offsets(xi_j: float, n: int) -> list[float]:
    if n == 1:
        return [0.0]
    return [(2 * q - n - 1) / (n - 1) * xi_j for q in range(1, n + 1)]


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _harmonic_band(A, B, C, lo, hi, out):
    """Arcs of ``u`` with ``A cos u + B sin u + C`` in ``[lo, hi]``."""
    amp = np.sqrt(A * A + B * B)
    if amp == 0.0:
        if lo <= C <= hi:
            out[0, 0] = 0.0
            out[0, 1] = TWO_PI
            return 1
        return 0
    return cos_band(np.arctan2(B, A), (lo - C) / amp, (hi - C) / amp, out)


@njit(cache=True)
def _girdle_pieces(d, offset, e1, e2, V, xi):
    """Pieces of ``u`` (clipped to ``r3 >= 0``) where ``|v_iᵀ r(u)| <= xi``."""
    M = V.shape[0]
    s = np.sqrt(max(1.0 - offset * offset, 0.0))
    arcs = np.empty((2, 2))
    hemi_lo = np.empty(2)
    hemi_hi = np.empty(2)
    hemi_own = np.empty(2, np.int64)
    nh = _harmonic_band(s * e1[2], s * e2[2], offset * d[2], 0.0, np.inf, arcs)
    kh = 0
    for a in range(nh):
        kh = push_arc(arcs[a, 0], arcs[a, 1], 0, hemi_lo, hemi_hi, hemi_own, kh)

    plo = np.empty(8 * M)
    phi = np.empty(8 * M)
    pown = np.empty(8 * M, np.int64)
    tlo = np.empty(4)
    thi = np.empty(4)
    town = np.empty(4, np.int64)
    k = 0
    for i in range(M):
        A = s * (V[i, 0] * e1[0] + V[i, 1] * e1[1] + V[i, 2] * e1[2])
        B = s * (V[i, 0] * e2[0] + V[i, 1] * e2[1] + V[i, 2] * e2[2])
        C = offset * (V[i, 0] * d[0] + V[i, 1] * d[1] + V[i, 2] * d[2])
        na = _harmonic_band(A, B, C, -xi, xi, arcs)
        kt = 0
        for a in range(na):
            kt = push_arc(arcs[a, 0], arcs[a, 1], i, tlo, thi, town, kt)
        for a in range(kt):
            for b in range(kh):
                lo = max(tlo[a], hemi_lo[b])
                hi = min(thi[a], hemi_hi[b])
                if lo <= hi:
                    plo[k] = lo
                    phi[k] = hi
                    pown[k] = i
                    k += 1
    return plo[:k], phi[:k], pown[:k], hemi_lo[:kh], hemi_hi[:kh]


@njit(cache=True)
def _girdle_stab(d, offset, e1, e2, V, xi):
    plo, phi, pown, hlo, hhi = _girdle_pieces(d, offset, e1, e2, V, xi)
    if hlo.shape[0] == 0:
        return -1, 0.0
    if plo.shape[0] == 0:
        return 0, 0.5 * (hlo[0] + hhi[0])
    x, count, end = sweep(plo, phi, pown, V.shape[0])
    return count, 0.5 * (x + end)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def circle_girdle_intervals(hc: HalfCircle, constraint: AxisConstraint) -> list[tuple[float, float]]:
    """Pieces ``[lo, hi]`` of ``[0, 2π]`` in the circle angle ``u`` whose
    axis ``r(u)`` lies in the girdle and in the upper hemisphere."""
    V = (constraint.d * 1.0)[None, :]
    plo, phi, _, _, _ = _girdle_pieces(hc.d, hc.offset, hc.e1, hc.e2, V, constraint.xi_i)
    return sorted(zip(plo.tolist(), phi.tolist()))


def hemisphere_intervals(hc: HalfCircle) -> list[tuple[float, float]]:
    """Pieces of ``u`` with ``r3(u) >= 0``."""
    _, _, _, hlo, hhi = _girdle_pieces(hc.d, hc.offset, hc.e1, hc.e2, np.empty((0, 3)), 1.0)
    return sorted(zip(hlo.tolist(), hhi.tolist()))


def solve_stage2(I1: ConsensusSet, t_prime: np.ndarray, cset: CorrespondenceSet,
                 W: AffinityMatrix, table: PriorityTable, cfg: PipelineConfig,
                 trace: list | None = None):
    """Return ``(r, I2)``: the best axis over the sampled girdles and the
    members of ``I1`` whose girdles contain it (the winning sample included).

    Raises :class:`DegenerateAxis` when no sample defines a girdle.
    """
    xi = cfg.xi
    V_all = cset.y - np.asarray(t_prime, dtype=np.float64) - cset.x
    members = np.asarray(I1.indices, dtype=np.int64)
    samples = draw_samples(table, cfg.k_r, cfg, restrict_to=members, N=cset.N, stream=2)
    best = None
    for j in samples:
        v = V_all[j]
        try:
            con = AxisConstraint.from_displacement(v, xi)
        except DegenerateAxis:
            continue
        cand = members[members != j]
        if cfg.use_verification:
            cand = verified_candidates(W, j, cand)
        V = np.ascontiguousarray(V_all[cand])
        for offset in half_circle_offsets(con.xi_i, cfg.n):
            hc = HalfCircle.make(con.d, offset)
            if trace is not None:
                trace.append({"stage": 2, "sample": int(j), "offset": offset,
                              "candidates": frozenset(cand.tolist())})
            count, u = _girdle_stab(hc.d, hc.offset, hc.e1, hc.e2, V, xi)
            if count < 0:
                continue
            if best is None or count > best[0]:
                best = (count, hc.point(u), int(j))
    if best is None:
        raise DegenerateAxis("no stage-II sample defines a usable girdle")
    _, r, j = best
    r = r / np.linalg.norm(r)
    keep = np.abs(V_all[members] @ r) <= xi
    I2 = ConsensusSet(np.union1d(members[keep], [j]), Stage.AXIS)
    return r, I2
