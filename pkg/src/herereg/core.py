"""Shared domain types and elementary rigid-motion operations."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, TypeAlias

import numpy as np
from numpy.typing import NDArray

Vec3: TypeAlias = NDArray[np.float64]
Mat3: TypeAlias = NDArray[np.float64]
Points: TypeAlias = NDArray[np.float64]  # (N, 3)

ORTHO_TOL = 1e-9
TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# Failure signals
# ---------------------------------------------------------------------------

class RegistrationSignal(Exception):
    """Base class for the named failure signals raised by the pipeline."""


class TooFewCorrespondences(RegistrationSignal):
    pass


class NoSamples(RegistrationSignal):
    pass


class DegenerateAxis(RegistrationSignal):
    pass


class NoAngle(RegistrationSignal):
    pass


class TooFewInliers(RegistrationSignal):
    pass


class DegenerateFit(RegistrationSignal):
    pass


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Correspondence:
    x: Vec3
    y: Vec3
    index: int


class CorrespondenceSet:
    """Paired source/target points stored as two ``(N, 3)`` arrays.

    The row position is the correspondence index and never changes.
    """

    def __init__(self, x, y):
        x = np.array(x, dtype=np.float64, copy=True).reshape(-1, 3)
        y = np.array(y, dtype=np.float64, copy=True).reshape(-1, 3)
        if x.shape != y.shape:
            raise ValueError(f"source and target shapes differ: {x.shape} vs {y.shape}")
        x.setflags(write=False)
        y.setflags(write=False)
        self.x = x
        self.y = y

    @property
    def N(self) -> int:
        return self.x.shape[0]

    def __len__(self) -> int:
        return self.N

    def __getitem__(self, i: int) -> Correspondence:
        i = int(i)
        if i < 0:
            i += self.N
        return Correspondence(self.x[i], self.y[i], i)

    def __iter__(self) -> Iterator[Correspondence]:
        return (self[i] for i in range(self.N))

    @property
    def items(self) -> list[Correspondence]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CorrespondenceSet):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def __repr__(self) -> str:
        return f"CorrespondenceSet(N={self.N})"


@dataclass(frozen=True)
class RigidTransform:
    R: Mat3 = field(default_factory=lambda: np.eye(3))
    t: Vec3 = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        R = np.array(self.R, dtype=np.float64).reshape(3, 3)
        t = np.array(self.t, dtype=np.float64).reshape(3)
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(t))):
            raise ValueError("transform entries must be finite")
        if not (np.all(np.abs(R.T @ R - np.eye(3)) <= ORTHO_TOL)
                and abs(np.linalg.det(R) - 1.0) <= ORTHO_TOL):
            raise ValueError("R must be a rotation (orthonormal, det +1)")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def inverse(self) -> "RigidTransform":
        return RigidTransform(self.R.T, -self.R.T @ self.t)

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Return ``self ∘ other`` (apply ``other`` first)."""
        return RigidTransform(self.R @ other.R, self.R @ other.t + self.t)

    def is_valid(self, tol: float = ORTHO_TOL) -> bool:
        R = self.R
        return bool(
            np.all(np.abs(R.T @ R - np.eye(3)) <= tol)
            and abs(np.linalg.det(R) - 1.0) <= tol
        )

    def matrix(self) -> NDArray[np.float64]:
        """3x4 ``[R | t]``."""
        return np.hstack([self.R, self.t[:, None]])


@dataclass(frozen=True)
class AxisAngle:
    """Rotation axis in the upper hemisphere and an angle in ``[0, 2π)``.

    With the axis restricted to ``r3 >= 0`` every rotation still has a
    representative, at the cost of letting the angle run over the full circle.
    Ties on the equator are broken by ``r2 >= 0``, then ``r1 >= 0``.
    """

    r: Vec3
    theta: float

    def __post_init__(self):
        r = np.asarray(self.r, dtype=np.float64).reshape(3)
        n = np.linalg.norm(r)
        if not np.isfinite(n) or n == 0.0:
            raise ValueError("rotation axis must be a nonzero finite vector")
        r = r / n
        theta = float(self.theta)
        if not _upper_hemisphere(r):
            r = -r
            theta = -theta
        theta = theta % TWO_PI
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_matrix(cls, R: Mat3) -> "AxisAngle":
        R = np.asarray(R, dtype=np.float64)
        cos_t = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
        theta = float(np.arccos(cos_t))
        w = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
        if np.linalg.norm(w) > 1e-8:
            return cls(w, theta)
        if theta < np.pi / 2:
            return cls(np.array([0.0, 0.0, 1.0]), 0.0)
        # half-turn: R = 2 r r^T - I
        S = (R + np.eye(3)) / 2.0
        k = int(np.argmax(np.diag(S)))
        r = S[:, k] / np.sqrt(max(S[k, k], 1e-300))
        return cls(r, np.pi)


def _upper_hemisphere(r: Vec3) -> bool:
    if r[2] != 0.0:
        return r[2] > 0.0
    if r[1] != 0.0:
        return r[1] > 0.0
    return r[0] >= 0.0


class Stage(enum.Enum):
    TRANSLATION = "translation"
    AXIS = "axis"
    ANGLE = "angle"
    FINAL = "final"


@dataclass(frozen=True)
class ConsensusSet:
    indices: NDArray[np.int64]
    stage: Stage = Stage.FINAL

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64).reshape(-1))
        if idx.size and idx[0] < 0:
            raise ValueError("consensus indices must be nonnegative")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __iter__(self):
        return iter(self.indices.tolist())

    def __contains__(self, i) -> bool:
        k = np.searchsorted(self.indices, i)
        return bool(k < self.indices.size and self.indices[k] == i)

    def as_set(self) -> set[int]:
        return set(self.indices.tolist())

    def with_stage(self, stage: Stage) -> "ConsensusSet":
        return ConsensusSet(self.indices, stage)


class Sampling(enum.Enum):
    VALID = "valid"
    RANDOM = "random"
    SCORE = "score"


@dataclass(frozen=True)
class PipelineConfig:
    """Hyperparameters for one registration run.

    ``xi`` is the inlier threshold in scene units; ``k_t``/``m`` are the
    stage-I sample count and surfaces per shell, ``k_r``/``n`` the stage-II
    sample count and half-circles per girdle, ``psi`` the minimal width of a
    stage-I branch.
    """

    xi: float
    k_t: int = 15
    m: int = 2
    k_r: int = 8
    n: int = 2
    psi: float = 1e-3
    seed: int = 0
    use_verification: bool = True
    sampling: Sampling = Sampling.VALID

    def __post_init__(self):
        if not self.xi > 0:
            raise ValueError(f"xi must be positive, got {self.xi}")
        if not self.psi > 0:
            raise ValueError(f"psi must be positive, got {self.psi}")
        for name in ("k_t", "m", "k_r", "n"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        object.__setattr__(self, "sampling", Sampling(self.sampling))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def skew(v: Vec3) -> Mat3:
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def rodrigues(axis_angle: AxisAngle) -> Mat3:
    """Rotation matrix ``r rᵀ + [r]× sin θ + (I − r rᵀ) cos θ``."""
    return rodrigues_raw(axis_angle.r, axis_angle.theta)


def rodrigues_raw(r: Vec3, theta: float) -> Mat3:
    r = np.asarray(r, dtype=np.float64)
    rr = np.outer(r, r)
    return rr + skew(r) * np.sin(theta) + (np.eye(3) - rr) * np.cos(theta)


def apply(transform: RigidTransform, p) -> NDArray[np.float64]:
    """``R p + t``; ``p`` may be a single point or an ``(N, 3)`` array."""
    p = np.asarray(p, dtype=np.float64)
    return p @ transform.R.T + transform.t


def residual(transform: RigidTransform, c: Correspondence) -> float:
    return float(np.linalg.norm(c.y - apply(transform, c.x)))


def residuals(transform: RigidTransform, cset: CorrespondenceSet) -> NDArray[np.float64]:
    return np.linalg.norm(cset.y - apply(transform, cset.x), axis=1)


def consensus(transform: RigidTransform, cset: CorrespondenceSet, xi: float,
              stage: Stage = Stage.FINAL) -> ConsensusSet:
    """Indices whose residual is at most ``xi`` (ties count as inliers)."""
    if not xi > 0:
        raise ValueError("xi must be positive")
    if cset.N == 0:
        return ConsensusSet(np.empty(0, dtype=np.int64), stage)
    return ConsensusSet(np.flatnonzero(residuals(transform, cset) <= xi), stage)
