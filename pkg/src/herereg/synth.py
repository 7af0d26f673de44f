"""Synthetic correspondence sets with known ground truth.

Source points are uniform in the unit cube ``[0, 1]^3``.  Targets are the
rigidly moved sources plus noise drawn uniformly inside a small ball; a
fraction ``rho`` of targets is then replaced by points drawn uniformly inside
a large ball around the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CorrespondenceSet, RigidTransform


@dataclass(frozen=True)
class SynthConfig:
    N: int
    rho: float
    noise_radius: float = 0.02
    outlier_radius: float = 5.0
    t_max: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if self.noise_radius < 0:
            raise ValueError("noise_radius must be nonnegative")
        if not self.outlier_radius > 0:
            raise ValueError("outlier_radius must be positive")


def uniform_in_ball(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (radius * rng.random(n) ** (1.0 / 3.0))[:, None]


def quaternion_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform rotation: a Gaussian 4-vector normalized is uniform on S^3."""
    return quaternion_to_matrix(rng.normal(size=4))


def generate(cfg: SynthConfig, source: np.ndarray | None = None):
    """Return ``(correspondences, ground_truth, inlier_mask)``.

    ``source`` replaces the unit-cube sampling (e.g. a downsampled mesh);
    its length overrides ``cfg.N``.
    """
    rng = np.random.default_rng(cfg.seed)
    if source is None:
        x = rng.random((cfg.N, 3))
    else:
        x = np.asarray(source, dtype=np.float64).reshape(-1, 3)
    N = x.shape[0]
    R = random_rotation(rng)
    t = uniform_in_ball(rng, 1, cfg.t_max)[0]
    gt = RigidTransform(R, t)
    y = x @ R.T + t + uniform_in_ball(rng, N, cfg.noise_radius)
    n_out = min(N, math.ceil(cfg.rho * N - 1e-9))
    out_idx = rng.choice(N, size=n_out, replace=False)
    y[out_idx] = uniform_in_ball(rng, n_out, cfg.outlier_radius)
    mask = np.ones(N, dtype=bool)
    mask[out_idx] = False
    return CorrespondenceSet(x, y), gt, mask
