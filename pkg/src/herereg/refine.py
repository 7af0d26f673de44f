"""Least-squares rigid fit on a consensus set, and the final recount."""

from __future__ import annotations

import numpy as np

from .core import (ConsensusSet, CorrespondenceSet, DegenerateFit, RigidTransform, Stage,
                   TooFewInliers, consensus)
from .angle import assemble

_DEGENERATE_RATIO = 1e-12


def fit_rigid(cset: CorrespondenceSet, indices) -> RigidTransform:
    """Transform minimizing the summed squared residuals of the selected pairs.

    Closed-form Procrustes: centroids, 3x3 cross-covariance, SVD, and a sign
    flip on the weakest singular direction when the plain solution would be a
    reflection.
    """
    idx = np.asarray(indices.indices if isinstance(indices, ConsensusSet) else indices,
                     dtype=np.int64)
    if idx.size < 3:
        raise TooFewInliers(f"need at least 3 pairs to fit a rigid transform, got {idx.size}")
    X = cset.x[idx]
    Y = cset.y[idx]
    cx = X.mean(axis=0)
    cy = Y.mean(axis=0)
    H = (X - cx).T @ (Y - cy)
    U, S, Vt = np.linalg.svd(H)
    if S[0] == 0.0 or S[1] <= _DEGENERATE_RATIO * S[0]:
        raise DegenerateFit("selected source points are collinear or coincident")
    D = np.diag([1.0, 1.0, np.sign(np.linalg.det(Vt.T @ U.T)) or 1.0])
    R = Vt.T @ D @ U.T
    return RigidTransform(R, cy - R @ cx)


def finalize(cset: CorrespondenceSet, t_prime, r_prime, theta: float,
             xi: float) -> tuple[RigidTransform, ConsensusSet]:
    """Assemble the staged estimate, recount on the full set, refit twice and
    keep the refit with the larger consensus (the later one on ties)."""
    assembled = RigidTransform(assemble(r_prime, theta), t_prime)
    current = consensus(assembled, cset, xi, Stage.FINAL)
    try:
        first = fit_rigid(cset, current)
    except TooFewInliers:
        return assembled, current
    first_cs = consensus(first, cset, xi, Stage.FINAL)
    try:
        second = fit_rigid(cset, first_cs)
    except (TooFewInliers, DegenerateFit):
        return first, first_cs
    second_cs = consensus(second, cset, xi, Stage.FINAL)
    if len(second_cs) >= len(first_cs):
        return second, second_cs
    return first, first_cs
