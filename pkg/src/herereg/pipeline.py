"""End-to-end registration: compatibility, three search stages, refinement."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from .angle import assemble, solve_stage3
from .axis import solve_stage2
from .compat import AffinityMatrix, PriorityTable, build_affinity, compute_priorities
from .core import (AxisAngle, ConsensusSet, CorrespondenceSet, DegenerateAxis, DegenerateFit,
                   NoAngle, PipelineConfig, RigidTransform, Stage, TooFewCorrespondences,
                   TooFewInliers, consensus)
from .refine import finalize, fit_rigid
from .translation import solve_stage1

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegistrationReport:
    transform: RigidTransform
    consensus: ConsensusSet
    stage_sizes: tuple[int, int, int]
    stage_times: tuple[float, float, float]
    config_echo: PipelineConfig
    setup_time: float = 0.0
    total_time: float = 0.0
    signals: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        cfg = self.config_echo
        return {
            "rotation": self.transform.R.reshape(-1).tolist(),
            "translation": self.transform.t.tolist(),
            "transform": self.transform.matrix().tolist(),
            "consensus": self.consensus.indices.tolist(),
            "stage_sizes": list(self.stage_sizes),
            "stage_times": list(self.stage_times),
            "signals": list(self.signals),
            "config": {
                "xi": cfg.xi, "k_t": cfg.k_t, "m": cfg.m, "k_r": cfg.k_r, "n": cfg.n,
                "psi": cfg.psi, "seed": cfg.seed,
                "use_verification": cfg.use_verification, "sampling": cfg.sampling.value,
            },
        }


def _fallback_axis_angle(cset: CorrespondenceSet, members: ConsensusSet) -> AxisAngle:
    """Axis-angle of a least-squares fit on ``members``, identity if impossible."""
    try:
        return AxisAngle.from_matrix(fit_rigid(cset, members).R)
    except (TooFewInliers, DegenerateFit):
        return AxisAngle(np.array([0.0, 0.0, 1.0]), 0.0)


def _angle_about(R: np.ndarray, r: np.ndarray) -> float:
    """Angle of the rotation about ``r`` that best matches ``R``."""
    e1 = np.cross(r, [1.0, 0.0, 0.0] if abs(r[0]) < 0.9 else [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    Re1 = R @ e1
    return float(np.arctan2(np.dot(np.cross(e1, Re1), r), np.dot(e1, Re1)))


def register(cset: CorrespondenceSet, cfg: PipelineConfig, *,
             affinity: AffinityMatrix | None = None,
             priorities: PriorityTable | None = None,
             trace: list | None = None) -> RegistrationReport:
    """Estimate the rigid transform with the largest consensus.

    ``affinity``/``priorities`` may be passed in to reuse a precomputed
    matrix.  When ``trace`` is a list, one record per stabbing setup in
    stages I and II is appended to it (sample index and candidate owners).
    """
    if cset.N < 3:
        raise TooFewCorrespondences(f"need at least 3 correspondences, got {cset.N}")
    signals = []
    t_start = time.perf_counter()

    W = affinity if affinity is not None else build_affinity(cset, cfg.xi)
    table = priorities if priorities is not None else compute_priorities(W)
    t_setup = time.perf_counter()

    t_prime, I1 = solve_stage1(cset, W, table, cfg, trace=trace)
    t1 = time.perf_counter()

    try:
        r_prime, I2 = solve_stage2(I1, t_prime, cset, W, table, cfg, trace=trace)
    except DegenerateAxis as exc:
        log.info("stage II fallback: %s", exc)
        signals.append(type(exc).__name__)
        r_prime = _fallback_axis_angle(cset, I1).r
        I2 = I1.with_stage(Stage.AXIS)
    t2 = time.perf_counter()

    try:
        theta, I3 = solve_stage3(I2, t_prime, r_prime, cset, cfg.xi)
    except NoAngle as exc:
        log.info("stage III fallback: %s", exc)
        signals.append(type(exc).__name__)
        try:
            theta = _angle_about(fit_rigid(cset, I2).R, r_prime)
        except (TooFewInliers, DegenerateFit):
            theta = 0.0
        I3 = I2.with_stage(Stage.ANGLE)
    t3 = time.perf_counter()

    try:
        transform, final = finalize(cset, t_prime, r_prime, theta, cfg.xi)
    except DegenerateFit as exc:
        log.info("refinement fallback: %s", exc)
        signals.append(type(exc).__name__)
        transform = RigidTransform(assemble(r_prime, theta), t_prime)
        final = consensus(transform, cset, cfg.xi)
    t_end = time.perf_counter()

    return RegistrationReport(
        transform=transform,
        consensus=final,
        stage_sizes=(len(I1), len(I2), len(I3)),
        stage_times=(t1 - t_setup, t2 - t1, t3 - t2),
        config_echo=cfg,
        setup_time=t_setup - t_start,
        total_time=t_end - t_start,
        signals=tuple(signals),
    )
