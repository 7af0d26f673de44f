"""Error metrics, outlier-removal metrics, success test and a RANSAC baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (ConsensusSet, CorrespondenceSet, DegenerateFit, RigidTransform, Stage,
                   TooFewCorrespondences, TooFewInliers, consensus)
from .refine import fit_rigid

_BATCH = 1024
_BATCH_ELEMENTS = 1 << 20


def rotation_error(R_hat, R_star) -> float:
    """Geodesic angle in degrees between two rotations."""
    c = (np.trace(np.asarray(R_hat).T @ np.asarray(R_star)) - 1.0) / 2.0
    return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


def translation_error(t_hat, t_star) -> float:
    return float(np.linalg.norm(np.asarray(t_hat, dtype=np.float64) - np.asarray(t_star)))


def inlier_metrics(kept, true_mask) -> tuple[float, float, float]:
    """Inlier precision, recall and F1 of a kept index set."""
    mask = np.asarray(true_mask, dtype=bool)
    idx = np.asarray(kept.indices if isinstance(kept, ConsensusSet) else kept, dtype=np.int64)
    n_true = int(mask.sum())
    hits = int(mask[idx].sum()) if idx.size else 0
    if idx.size == 0:
        ip = 1.0 if n_true == 0 else 0.0
    else:
        ip = hits / idx.size
    ir = hits / n_true if n_true else 1.0
    f1 = 0.0 if ip + ir == 0 else 2.0 * ip * ir / (ip + ir)
    return ip, ir, f1


@dataclass(frozen=True)
class Thresholds:
    rotation_deg: float = 5.0
    translation: float = 0.1


def success(E_R_deg: float, E_t: float, thresholds: Thresholds = Thresholds()) -> bool:
    """Both errors strictly below their thresholds."""
    return E_R_deg < thresholds.rotation_deg and E_t < thresholds.translation


def _batched_kabsch(X: np.ndarray, Y: np.ndarray):
    """Fit one rigid transform per triple; ``X``, ``Y`` are (B, 3, 3).

    Returns ``R`` (B, 3, 3), ``t`` (B, 3) and a mask of usable triples.
    """
    cx = X.mean(axis=1)
    cy = Y.mean(axis=1)
    H = np.einsum("bki,bkj->bij", X - cx[:, None], Y - cy[:, None])
    U, S, Vt = np.linalg.svd(H)
    ok = (S[:, 0] > 0.0) & (S[:, 1] > 1e-12 * S[:, 0])
    V = np.swapaxes(Vt, 1, 2)
    Ut = np.swapaxes(U, 1, 2)
    det = np.linalg.det(V @ Ut)
    V[:, :, 2] *= np.where(det < 0, -1.0, 1.0)[:, None]
    R = V @ Ut
    t = cy - np.einsum("bij,bj->bi", R, cx)
    return R, t, ok


def ransac_baseline(cset: CorrespondenceSet, xi: float, iterations: int,
                    seed: int = 0) -> tuple[RigidTransform, ConsensusSet]:
    """Plain RANSAC with minimal three-point samples.

    Hypotheses are scored in batches; the best one (first on ties) is refit
    on its consensus and the refit is kept when it scores at least as well.
    """
    N = cset.N
    if N < 3:
        raise TooFewCorrespondences(f"need at least 3 correspondences, got {N}")
    rng = np.random.default_rng(seed)
    x, y = cset.x, cset.y
    best_count, best_T = -1, RigidTransform.identity()
    xi2 = xi * xi
    done = 0
    batch = max(1, min(_BATCH, _BATCH_ELEMENTS // N))
    while done < iterations:
        b = min(batch, iterations - done)
        done += b
        idx = _triples(rng, N, b)
        R, t, ok = _batched_kabsch(x[idx], y[idx])
        if not ok.any():
            continue
        R, t = R[ok], t[ok]
        res = y[None, :, :] - (np.einsum("bij,nj->bni", R, x) + t[:, None, :])
        counts = ((res * res).sum(axis=2) <= xi2).sum(axis=1)
        k = int(np.argmax(counts))
        if counts[k] > best_count:
            best_count = int(counts[k])
            best_T = RigidTransform(R[k], t[k])
    best_cs = consensus(best_T, cset, xi, Stage.FINAL)
    try:
        refit = fit_rigid(cset, best_cs)
    except (TooFewInliers, DegenerateFit):
        return best_T, best_cs
    refit_cs = consensus(refit, cset, xi, Stage.FINAL)
    if len(refit_cs) >= len(best_cs):
        return refit, refit_cs
    return best_T, best_cs


def _triples(rng: np.random.Generator, N: int, b: int) -> np.ndarray:
    """``b`` rows of three distinct indices in ``[0, N)``."""
    i = rng.integers(0, N, b)
    j = rng.integers(0, N - 1, b)
    j += j >= i
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    k = rng.integers(0, N - 2, b)
    k += k >= lo
    k += k >= hi
    return np.stack([i, j, k], axis=1)
