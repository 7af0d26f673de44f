"""Maximum interval stabbing on a line and on the circle.

A sweep over sorted endpoints finds a point covered by the largest number of
closed intervals.  Intervals carry an owner id and each owner counts at most
once, so an arc split at the ``0 / 2π`` seam (or any owner with several
disjoint pieces) is still a single vote.

The array kernels here are shared by the three search stages; the
:class:`Interval` based functions are the public, convenience surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .core import TWO_PI


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    owner: int


@dataclass(frozen=True)
class StabResult:
    """Best stabber, how many owners it stabs, and which ones.

    ``end`` is the right edge of the maximal region that starts at
    ``stabber``; every point of ``[stabber, end]`` stabs the same owners.
    """

    stabber: float
    count: int
    stabbed: frozenset
    end: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.stabber + self.end)


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def sweep(lo, hi, owner, n_owner):
    """Return ``(stabber, count, region_end)`` for closed intervals.

    Left endpoints sort before right endpoints at equal coordinates, and the
    first (smallest) maximizing left endpoint wins.
    """
    m = lo.shape[0]
    if m == 0:
        return 0.0, 0, 0.0
    ol = np.argsort(lo, kind="mergesort")
    oh = np.argsort(hi, kind="mergesort")
    active = np.zeros(n_owner, np.int64)
    i = 0
    k = 0
    count = 0
    best = 0
    best_x = lo[ol[0]]
    best_end = best_x
    open_region = False
    while i < m:
        if lo[ol[i]] <= hi[oh[k]]:
            o = owner[ol[i]]
            active[o] += 1
            if active[o] == 1:
                count += 1
                if count > best:
                    best = count
                    best_x = lo[ol[i]]
                    open_region = True
            i += 1
        else:
            o = owner[oh[k]]
            active[o] -= 1
            if active[o] == 0:
                count -= 1
                if open_region:
                    best_end = hi[oh[k]]
                    open_region = False
            k += 1
    while open_region and k < m:
        o = owner[oh[k]]
        active[o] -= 1
        if active[o] == 0:
            best_end = hi[oh[k]]
            open_region = False
        k += 1
    return best_x, best, best_end


@njit(cache=True)
def push_arc(lo, hi, own, plo, phi, pown, k):
    """Append the circular arc ``[lo, hi]`` (``hi >= lo``) as pieces of ``[0, 2π]``.

    Arcs of length ``>= 2π`` become the whole circle.  Returns the new fill
    count of the output buffers.
    """
    width = hi - lo
    if width >= TWO_PI:
        plo[k] = 0.0
        phi[k] = TWO_PI
        pown[k] = own
        return k + 1
    a = lo % TWO_PI
    b = a + width
    if b < TWO_PI:
        plo[k] = a
        phi[k] = b
        pown[k] = own
        return k + 1
    plo[k] = a
    phi[k] = TWO_PI
    pown[k] = own
    plo[k + 1] = 0.0
    phi[k + 1] = b - TWO_PI
    pown[k + 1] = own
    return k + 2


@njit(cache=True)
def cos_band(center, c_lo, c_hi, out):
    """Arcs of ``φ`` with ``cos(φ - center)`` in ``[c_lo, c_hi]``.

    Writes up to two ``(lo, hi)`` rows into ``out`` and returns how many.
    A full circle is reported as ``(center - π, center + π)``.
    """
    lo_c = max(c_lo, -1.0)
    hi_c = min(c_hi, 1.0)
    if lo_c > hi_c:
        return 0
    a_hi = np.arccos(lo_c)  # widest |φ - center|
    a_lo = np.arccos(hi_c)  # narrowest |φ - center|
    if a_lo <= 0.0:
        out[0, 0] = center - a_hi
        out[0, 1] = center + a_hi
        return 1
    if a_hi >= np.pi:
        out[0, 0] = center + a_lo
        out[0, 1] = center + TWO_PI - a_lo
        return 1
    out[0, 0] = center + a_lo
    out[0, 1] = center + a_hi
    out[1, 0] = center - a_hi
    out[1, 1] = center - a_lo
    return 2


@njit(cache=True)
def stabbed_mask(lo, hi, owner, n_owner, x):
    hit = np.zeros(n_owner, np.bool_)
    for i in range(lo.shape[0]):
        if lo[i] <= x <= hi[i]:
            hit[owner[i]] = True
    return hit


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def _dense_owners(owners: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    uniq, dense = np.unique(owners, return_inverse=True)
    return uniq, dense.astype(np.int64)


def stab_arrays(lo, hi, owner) -> StabResult:
    """Linear stabbing over parallel arrays of closed intervals."""
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    owner = np.asarray(owner, dtype=np.int64)
    if lo.size == 0:
        return StabResult(0.0, 0, frozenset(), 0.0)
    if np.any(lo > hi):
        raise ValueError("linear intervals need lo <= hi")
    uniq, dense = _dense_owners(owner)
    x, count, end = sweep(lo, hi, dense, uniq.size)
    hit = stabbed_mask(lo, hi, dense, uniq.size, x)
    stabbed = frozenset(uniq[hit].tolist())
    return StabResult(float(x), int(count), stabbed, float(end))


def stab_linear(intervals: Sequence[Interval]) -> StabResult:
    """Point on the line inside the most intervals (ties -> smallest)."""
    if len(intervals) == 0:
        return StabResult(0.0, 0, frozenset(), 0.0)
    lo = np.array([iv.lo for iv in intervals], dtype=np.float64)
    hi = np.array([iv.hi for iv in intervals], dtype=np.float64)
    own = np.array([iv.owner for iv in intervals], dtype=np.int64)
    return stab_arrays(lo, hi, own)


def _as_arcs(arcs: Iterable) -> list[tuple[float, float, int]]:
    out = []
    for pos, a in enumerate(arcs):
        if isinstance(a, Interval):
            out.append((a.lo, a.hi, a.owner))
        elif len(a) == 3:
            out.append((float(a[0]), float(a[1]), int(a[2])))
        else:
            out.append((float(a[0]), float(a[1]), pos))
    return out


def split_arcs(arcs: Iterable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten ``(start, end[, owner])`` arcs into linear pieces of ``[0, 2π]``.

    ``start > end`` means the arc runs through zero.  An arc whose span is at
    least ``2π`` (e.g. ``(0, 2π)``) is the whole circle.
    """
    items = _as_arcs(arcs)
    n = len(items)
    plo = np.empty(2 * n)
    phi = np.empty(2 * n)
    pown = np.empty(2 * n, dtype=np.int64)
    k = 0
    for start, end, own in items:
        span = end - start if start <= end else end - start + TWO_PI
        k = push_arc(start, start + span, own, plo, phi, pown, k)
    return plo[:k], phi[:k], pown[:k]


def stab_circular(arcs: Iterable) -> StabResult:
    """Point of the circle ``[0, 2π)`` inside arcs of the most distinct owners.

    Each arc is ``(start, end)``, ``(start, end, owner)`` or an
    :class:`Interval` whose ``lo``/``hi`` are read as start/end.  Owners
    default to the arc's position in the input.
    """
    plo, phi, pown = split_arcs(arcs)
    if plo.size == 0:
        return StabResult(0.0, 0, frozenset(), 0.0)
    return stab_arrays(plo, phi, pown)
