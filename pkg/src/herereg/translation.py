"""Stage I: translation search.

Eliminating the rotation turns each correspondence's inlier condition into a
spherical shell of translations, ``| ||y_i - t|| - ||x_i|| | <= xi``.  For
every sampled correspondence ``j`` its own shell is sliced into ``m``
concentric spherical surfaces, and each surface is searched exhaustively with
a best-first BnB over the height ``t3``.  At a fixed height the surface is a
horizontal circle and every other shell cuts it in at most two arcs of the
azimuth ``phi``, so the inner maximization is one circular stabbing.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from numba import njit

from .compat import AffinityMatrix, PriorityTable, verified_candidates
from .core import (ConsensusSet, Correspondence, CorrespondenceSet, NoSamples,
                   PipelineConfig, Stage)
from .sampling import draw_samples
from .stabbing import cos_band, push_arc, stabbed_mask, sweep


@dataclass(frozen=True)
class SphericalShell:
    """Translations that keep one correspondence's distance gap within ``xi``."""

    center: np.ndarray
    norm_x: float
    xi: float

    @classmethod
    def of(cls, c: Correspondence, xi: float) -> "SphericalShell":
        return cls(np.asarray(c.y, dtype=np.float64), float(np.linalg.norm(c.x)), xi)

    @property
    def r_in(self) -> float:
        return max(self.norm_x - self.xi, 0.0)

    @property
    def r_out(self) -> float:
        return self.norm_x + self.xi

    def surfaces(self, m: int) -> list["SphericalSurface"]:
        return [SphericalSurface(self.center, r) for r in surface_radii(self.norm_x, self.xi, m)]


def surface_radii(norm_x: float, xi: float, m: int) -> list[float]:
    """Radii of ``m`` evenly spaced surfaces from the inner to the outer wall;
    ``m = 1`` is the mid surface.  Nonpositive radii are dropped."""
    if m == 1:
        radii = [norm_x]
    else:
        radii = [norm_x + (2 * p - m - 1) / (m - 1) * xi for p in range(1, m + 1)]
    return [r for r in radii if r > 0.0]


@dataclass(frozen=True)
class SphericalSurface:
    center: np.ndarray
    radius: float

    @property
    def z_range(self) -> tuple[float, float]:
        cz = float(self.center[2])
        return cz - self.radius, cz + self.radius

    def circle_radius(self, t3: float) -> float:
        dz = t3 - float(self.center[2])
        return float(np.sqrt(max(self.radius ** 2 - dz * dz, 0.0)))

    def point(self, t3: float, phi: float) -> np.ndarray:
        s = self.circle_radius(t3)
        c = self.center
        return np.array([c[0] + s * np.cos(phi), c[1] + s * np.sin(phi), t3])


@dataclass(frozen=True)
class Branch:
    t3_lo: float
    t3_hi: float
    upper: int = 0

    @property
    def center_t3(self) -> float:
        return 0.5 * (self.t3_lo + self.t3_hi)

    @property
    def width(self) -> float:
        return self.t3_hi - self.t3_lo


@dataclass(frozen=True)
class SurfaceResult:
    t3: float
    phi: float
    count: int
    consensus: np.ndarray
    t: np.ndarray


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _circle_pieces(cx, cy, cz, radius, t3, Y, nx, thr):
    """Azimuth pieces, per candidate, where the ring of candidate i meets the
    circle at height ``t3`` with tolerance ``thr``."""
    M = Y.shape[0]
    plo = np.empty(4 * M)
    phi = np.empty(4 * M)
    pown = np.empty(4 * M, np.int64)
    arcs = np.empty((2, 2))
    dz = t3 - cz
    s = np.sqrt(max(radius * radius - dz * dz, 0.0))
    k = 0
    for i in range(M):
        px = Y[i, 0] - cx
        py = Y[i, 1] - cy
        h = t3 - Y[i, 2]
        rho = np.sqrt(px * px + py * py)
        base = h * h + s * s + rho * rho
        d_hi = nx[i] + thr
        d_lo = max(nx[i] - thr, 0.0)
        two_s_rho = 2.0 * s * rho
        if two_s_rho == 0.0:
            if d_lo * d_lo <= base <= d_hi * d_hi:
                k = push_arc(0.0, 2.0 * np.pi, i, plo, phi, pown, k)
            continue
        c_lo = (base - d_hi * d_hi) / two_s_rho
        c_hi = (base - d_lo * d_lo) / two_s_rho
        na = cos_band(np.arctan2(py, px), c_lo, c_hi, arcs)
        for a in range(na):
            k = push_arc(arcs[a, 0], arcs[a, 1], i, plo, phi, pown, k)
    return plo[:k], phi[:k], pown[:k]


@njit(cache=True)
def _circle_count(cx, cy, cz, radius, t3, Y, nx, thr):
    plo, phi, pown = _circle_pieces(cx, cy, cz, radius, t3, Y, nx, thr)
    x, count, end = sweep(plo, phi, pown, Y.shape[0])
    return count, 0.5 * (x + end)


@njit(cache=True)
def _circle_stabbed(cx, cy, cz, radius, t3, Y, nx, thr, phi_star):
    plo, phi, pown = _circle_pieces(cx, cy, cz, radius, t3, Y, nx, thr)
    return stabbed_mask(plo, phi, pown, Y.shape[0], phi_star)


def _chord(surface: SphericalSurface, h1: float, h2: float) -> float:
    ds = surface.circle_radius(h1) - surface.circle_radius(h2)
    return float(np.hypot(ds, h1 - h2))


def branch_radius(branch: Branch, surface: SphericalSurface) -> float:
    """Farthest distance from the branch-center circle point to any surface
    point on the same meridian within the branch (the meridian chord to the
    nearer of the two branch ends is never the larger one)."""
    c = branch.center_t3
    return max(_chord(surface, c, branch.t3_lo), _chord(surface, c, branch.t3_hi))


class _SurfaceProblem:
    """Candidate data for one surface, laid out for the kernels."""

    def __init__(self, surface: SphericalSurface, candidates, cset: CorrespondenceSet):
        self.surface = surface
        self.candidates = np.asarray(candidates, dtype=np.int64)
        self.Y = np.ascontiguousarray(cset.y[self.candidates])
        self.nx = np.linalg.norm(cset.x[self.candidates], axis=1)
        c = surface.center
        self.args = (float(c[0]), float(c[1]), float(c[2]), float(surface.radius))

    def count(self, t3: float, thr: float) -> tuple[int, float]:
        if self.candidates.size == 0:
            return 0, 0.0
        count, phi = _circle_count(*self.args, t3, self.Y, self.nx, thr)
        return int(count), float(phi)

    def stabbed(self, t3: float, thr: float, phi: float) -> np.ndarray:
        if self.candidates.size == 0:
            return self.candidates
        mask = _circle_stabbed(*self.args, t3, self.Y, self.nx, thr, phi)
        return self.candidates[mask]

    def upper(self, branch: Branch, xi: float) -> int:
        lo, hi = self.surface.z_range
        if branch.t3_hi < lo or branch.t3_lo > hi:
            return 0
        delta = branch_radius(branch, self.surface)
        return self.count(branch.center_t3, xi + delta)[0]


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def circle_shell_intervals(surface: SphericalSurface, t3: float, candidate: Correspondence,
                           threshold: float) -> list[tuple[float, float]]:
    """Azimuth arcs ``(start, end)`` on the circle of ``surface`` at height
    ``t3`` whose points satisfy the shell condition of ``candidate``.

    Arcs are returned as ``start <= end`` in unwrapped radians; the full
    circle is ``(0, 2π)``.
    """
    lo, hi = surface.z_range
    if not lo <= t3 <= hi:
        raise ValueError("t3 lies outside the surface")
    c = surface.center
    plo, phi, _ = _circle_pieces(float(c[0]), float(c[1]), float(c[2]), float(surface.radius),
                                 float(t3), np.asarray(candidate.y, dtype=np.float64)[None, :],
                                 np.array([np.linalg.norm(candidate.x)]), float(threshold))
    return _merge_seam(list(zip(plo.tolist(), phi.tolist())))


def _merge_seam(pieces: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Glue a piece ending at 2π to one starting at 0 so arcs read whole."""
    two_pi = 2.0 * np.pi
    tail = [p for p in pieces if p[1] == two_pi and p[0] > 0.0]
    head = [p for p in pieces if p[0] == 0.0 and p[1] < two_pi]
    if tail and head:
        rest = [p for p in pieces if p is not tail[0] and p is not head[0]]
        rest.append((tail[0][0], head[0][1] + two_pi))
        return sorted(rest)
    return sorted(pieces)


def compute_bounds(branch: Branch, surface: SphericalSurface, candidates,
                   cset: CorrespondenceSet, xi: float) -> tuple[int, int, float]:
    """``(lower, upper, best_phi)`` for a height branch of ``surface``."""
    prob = _SurfaceProblem(surface, candidates, cset)
    lo, hi = surface.z_range
    if branch.t3_hi < lo or branch.t3_lo > hi:
        return 0, 0, 0.0
    lower, phi = prob.count(branch.center_t3, xi)
    return lower, prob.upper(branch, xi), phi


def search_surface(surface: SphericalSurface, candidates, cset: CorrespondenceSet,
                   cfg: PipelineConfig) -> SurfaceResult:
    """Globally maximize the number of candidate shells through one point of
    ``surface``, at height resolution ``cfg.psi``."""
    xi = cfg.xi
    prob = _SurfaceProblem(surface, candidates, cset)
    z_lo, z_hi = surface.z_range
    best, best_t3, best_phi = 0, float(surface.center[2]), 0.0
    if prob.candidates.size == 0:
        return SurfaceResult(best_t3, best_phi, 0, prob.candidates,
                             surface.point(best_t3, best_phi))

    root = Branch(z_lo, z_hi)
    seq = 0
    heap = [(-prob.upper(root, xi), -root.width, seq, root)]
    while heap:
        neg_upper, _, _, br = heapq.heappop(heap)
        if -neg_upper <= best:
            break
        lower, phi = prob.count(br.center_t3, xi)
        if lower > best:
            best, best_t3, best_phi = lower, br.center_t3, phi
        if br.width <= cfg.psi:
            continue
        mid = br.center_t3
        for sub in (Branch(br.t3_lo, mid), Branch(mid, br.t3_hi)):
            up = prob.upper(sub, xi)
            if up < best:
                continue
            seq += 1
            heapq.heappush(heap, (-up, -sub.width, seq, sub))

    stabbed = prob.stabbed(best_t3, xi, best_phi)
    return SurfaceResult(best_t3, best_phi, best, stabbed, surface.point(best_t3, best_phi))


def shell_consensus(t: np.ndarray, cset: CorrespondenceSet, xi: float) -> np.ndarray:
    """Indices whose rotation-free shell condition holds at translation ``t``."""
    gap = np.abs(np.linalg.norm(cset.y - t, axis=1) - np.linalg.norm(cset.x, axis=1))
    return np.flatnonzero(gap <= xi)


def solve_stage1(cset: CorrespondenceSet, W: AffinityMatrix, table: PriorityTable,
                 cfg: PipelineConfig, trace: list | None = None):
    """Return ``(t, I1)``: the best translation over all sampled surfaces and
    its shell consensus on the full set (the winning sample included)."""
    N = cset.N
    samples = draw_samples(table, cfg.k_t, cfg, restrict_to=None, N=N, stream=1)
    everyone = np.arange(N, dtype=np.int64)
    best = None
    for j in samples:
        cand = everyone[everyone != j]
        if cfg.use_verification:
            cand = verified_candidates(W, j, cand)
        norm_x = float(np.linalg.norm(cset.x[j]))
        for radius in surface_radii(norm_x, cfg.xi, cfg.m):
            surface = SphericalSurface(cset.y[j].copy(), radius)
            if trace is not None:
                trace.append({"stage": 1, "sample": int(j), "radius": radius,
                              "candidates": frozenset(cand.tolist())})
            res = search_surface(surface, cand, cset, cfg)
            if best is None or res.count > best[0].count:
                best = (res, int(j))
    if best is None:
        raise NoSamples("no usable stage-I sample")
    res, j = best
    members = np.union1d(shell_consensus(res.t, cset, cfg.xi), [j])
    return res.t, ConsensusSet(members, Stage.TRANSLATION)
