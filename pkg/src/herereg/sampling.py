"""Pick the assumptive-inlier samples for stages I and II."""

from __future__ import annotations

from .compat import PriorityTable, sample_random, sample_top
from .core import PipelineConfig, Sampling


def draw_samples(table: PriorityTable, k: int, cfg: PipelineConfig, restrict_to=None,
                 N: int | None = None, stream: int = 0) -> list[int]:
    """``k`` samples according to ``cfg.sampling``.

    Random draws use an RNG seeded by ``(cfg.seed, stream)`` so the two
    stages get independent, reproducible streams.
    """
    if cfg.sampling is Sampling.VALID:
        return sample_top(table, k, restrict_to, by="priority")
    if cfg.sampling is Sampling.SCORE:
        return sample_top(table, k, restrict_to, by="score")
    N = table.priority.size if N is None else N
    return sample_random(N, k, [cfg.seed, stream], restrict_to)
