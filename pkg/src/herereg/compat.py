"""Pairwise spatial compatibility, priorities and sampling.

Two correspondences ``u, v`` are compatible when the distance between their
source points and the distance between their target points differ by at most
``2 xi``.  Rigid motions preserve distances, so two true inliers are always
compatible; an incompatible pair contains at least one outlier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import ConsensusSet, CorrespondenceSet

MAX_N = 20_000
_BLOCK_ROWS = 512


@njit(cache=True)
def _compat_block(x, y, r0, r1, thresh):
    n = x.shape[0]
    out = np.zeros((r1 - r0, n), np.bool_)
    for a in range(r0, r1):
        for b in range(n):
            dx = np.sqrt((x[a, 0] - x[b, 0]) ** 2 + (x[a, 1] - x[b, 1]) ** 2
                         + (x[a, 2] - x[b, 2]) ** 2)
            dy = np.sqrt((y[a, 0] - y[b, 0]) ** 2 + (y[a, 1] - y[b, 1]) ** 2
                         + (y[a, 2] - y[b, 2]) ** 2)
            out[a - r0, b] = abs(dy - dx) <= thresh
    return out


class AffinityMatrix:
    """Symmetric boolean compatibility matrix stored as bit-packed rows."""

    def __init__(self, bits: np.ndarray, N: int):
        self.bits = bits
        self.N = int(N)

    def row(self, i: int) -> np.ndarray:
        return np.unpackbits(self.bits[i], count=self.N).view(np.bool_)

    def __getitem__(self, ij) -> bool:
        i, j = ij
        return bool((self.bits[i, j >> 3] >> (7 - (j & 7))) & 1)

    def rows(self, r0: int, r1: int) -> np.ndarray:
        return np.unpackbits(self.bits[r0:r1], axis=1, count=self.N).view(np.bool_)

    def to_dense(self) -> np.ndarray:
        return self.rows(0, self.N)

    @property
    def nbytes(self) -> int:
        return self.bits.nbytes


@dataclass(frozen=True)
class PriorityTable:
    score: np.ndarray
    priority: np.ndarray


def build_affinity(cset: CorrespondenceSet, xi: float) -> AffinityMatrix:
    if not xi > 0:
        raise ValueError("xi must be positive")
    N = cset.N
    if N > MAX_N:
        raise ValueError(
            f"{N} correspondences exceed the supported affinity size of {MAX_N}"
        )
    x = np.ascontiguousarray(cset.x)
    y = np.ascontiguousarray(cset.y)
    bits = np.empty((N, (N + 7) // 8), dtype=np.uint8)
    for r0 in range(0, N, _BLOCK_ROWS):
        r1 = min(N, r0 + _BLOCK_ROWS)
        bits[r0:r1] = np.packbits(_compat_block(x, y, r0, r1, 2.0 * xi), axis=1)
    return AffinityMatrix(bits, N)


def compute_priorities(W: AffinityMatrix) -> PriorityTable:
    """Score = number of compatible correspondences (self included);
    priority = sum of the scores of those compatible correspondences."""
    N = W.N
    score = np.empty(N, dtype=np.int64)
    for r0 in range(0, N, _BLOCK_ROWS):
        r1 = min(N, r0 + _BLOCK_ROWS)
        score[r0:r1] = W.rows(r0, r1).sum(axis=1)
    priority = np.empty(N, dtype=np.int64)
    for r0 in range(0, N, _BLOCK_ROWS):
        r1 = min(N, r0 + _BLOCK_ROWS)
        priority[r0:r1] = W.rows(r0, r1).astype(np.int64) @ score
    return PriorityTable(score, priority)


def _pool(N: int, restrict_to) -> np.ndarray:
    if restrict_to is None:
        return np.arange(N, dtype=np.int64)
    if isinstance(restrict_to, ConsensusSet):
        return np.asarray(restrict_to.indices, dtype=np.int64)
    return np.unique(np.asarray(restrict_to, dtype=np.int64))


def sample_top(table: PriorityTable, k: int, restrict_to=None, by: str = "priority") -> list[int]:
    """The ``k`` highest-ranked indices, best first; ties go to the lower index."""
    if k < 1:
        raise ValueError("k must be >= 1")
    key = table.priority if by == "priority" else table.score
    pool = _pool(key.size, restrict_to)
    order = np.lexsort((pool, -key[pool]))
    return pool[order[:k]].tolist()


def sample_random(N: int, k: int, seed, restrict_to=None) -> list[int]:
    """``k`` distinct uniformly drawn indices (all of them if ``k >= pool``)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pool = _pool(N, restrict_to)
    rng = np.random.default_rng(seed)
    return rng.permutation(pool)[:k].tolist()


def verify_against_sample(W: AffinityMatrix, sample: int, candidates) -> list[int]:
    cand = np.asarray(candidates, dtype=np.int64)
    return verified_candidates(W, sample, cand).tolist()


def verified_candidates(W: AffinityMatrix, sample: int, candidates: np.ndarray) -> np.ndarray:
    """Array form of :func:`verify_against_sample`, order preserved."""
    keep = W.row(sample)[candidates] & (candidates != sample)
    return candidates[keep]
