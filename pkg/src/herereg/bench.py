"""Monte-Carlo benchmark harness over an (N, rho) grid.

One row per (method, N, rho, seed).  Every method sees the same synthetic
instance for a given (N, rho, seed), so rows can be compared pairwise.
"""

from __future__ import annotations

import csv
import io
import logging
import re
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import PipelineConfig, RegistrationSignal
from .evaluation import (Thresholds, inlier_metrics, ransac_baseline, rotation_error,
                         success, translation_error)
from .pipeline import RegistrationReport, register
from .synth import SynthConfig, generate

log = logging.getLogger(__name__)

CSV_HEADER = ("method", "N", "rho", "seed", "E_R_deg", "E_t", "|I_final|", "IP", "IR", "F1",
              "time_ms")
SUMMARY_HEADER = ("method", "N", "rho", "trials", "median_E_R_deg", "median_E_t",
                  "median_time_ms", "success_rate")

_RANSAC = re.compile(r"^ransac-(\d+)(k?)$")


@dataclass(frozen=True)
class Row:
    method: str
    N: int
    rho: float
    seed: int
    E_R_deg: float
    E_t: float
    n_final: int
    IP: float
    IR: float
    F1: float
    time_ms: float

    def key(self):
        return (self.method, self.N, self.rho, self.seed)

    def cells(self) -> list[str]:
        return [self.method, str(self.N), repr(self.rho), str(self.seed),
                f"{self.E_R_deg:.6f}", f"{self.E_t:.6f}", str(self.n_final),
                f"{self.IP:.6f}", f"{self.IR:.6f}", f"{self.F1:.6f}", f"{self.time_ms:.3f}"]


@dataclass(frozen=True)
class BenchConfig:
    grid_n: tuple[int, ...] = (1000,)
    grid_rho: tuple[float, ...] = (0.9,)
    trials: int = 10
    methods: tuple[str, ...] = ("here",)
    xi: float = 0.02
    noise_radius: float = 0.02
    seed: int = 0
    pipeline: PipelineConfig = field(default_factory=lambda: PipelineConfig(xi=0.02))
    thresholds: Thresholds = Thresholds()


def ransac_iterations(method: str) -> int | None:
    """``ransac-1k`` -> 1000, ``ransac-250`` -> 250, anything else -> None."""
    m = _RANSAC.match(method)
    if m is None:
        return None
    return int(m.group(1)) * (1000 if m.group(2) else 1)


def check_methods(methods) -> None:
    for m in methods:
        if m not in ("here", "here-noverify") and ransac_iterations(m) is None:
            raise ValueError(f"unknown method {m!r}; use here, here-noverify or ransac-<iters>[k]")


def run_trial(method: str, N: int, rho: float, seed: int,
              cfg: BenchConfig) -> tuple[Row, RegistrationReport | None]:
    cset, gt, mask = generate(SynthConfig(N=N, rho=rho, noise_radius=cfg.noise_radius, seed=seed))
    report = None
    t0 = time.perf_counter()
    iters = ransac_iterations(method)
    if iters is not None:
        T, kept = ransac_baseline(cset, cfg.xi, iters, seed)
    else:
        pcfg = replace(cfg.pipeline, xi=cfg.xi, seed=seed,
                       use_verification=cfg.pipeline.use_verification and method == "here")
        report = register(cset, pcfg)
        T, kept = report.transform, report.consensus
    elapsed = time.perf_counter() - t0
    ip, ir, f1 = inlier_metrics(kept, mask)
    row = Row(method, N, rho, seed, rotation_error(T.R, gt.R), translation_error(T.t, gt.t),
              len(kept), ip, ir, f1, 1e3 * elapsed)
    return row, report


def run_bench(cfg: BenchConfig, on_row=None) -> tuple[list[Row], list[RegistrationReport]]:
    """Run the whole grid; rows come back sorted by (method, N, rho, seed).

    ``on_row`` is called with each row and its report (``None`` for RANSAC)
    as trials complete.
    """
    check_methods(cfg.methods)
    rows, reports = [], []
    for N in cfg.grid_n:
        for rho in cfg.grid_rho:
            for k in range(cfg.trials):
                seed = cfg.seed + k
                for method in cfg.methods:
                    try:
                        row, rep = run_trial(method, N, rho, seed, cfg)
                    except RegistrationSignal as exc:
                        log.warning("%s N=%d rho=%g seed=%d: %s", method, N, rho, seed, exc)
                        continue
                    rows.append(row)
                    if rep is not None:
                        reports.append(rep)
                    if on_row is not None:
                        on_row(row, rep)
    rows.sort(key=Row.key)
    return rows, reports


def summarize(rows, thresholds: Thresholds = Thresholds()) -> list[dict]:
    groups: dict[tuple, list[Row]] = {}
    for r in rows:
        groups.setdefault((r.method, r.N, r.rho), []).append(r)
    out = []
    for (method, N, rho), g in sorted(groups.items()):
        ok = [success(r.E_R_deg, r.E_t, thresholds) for r in g]
        out.append({
            "method": method, "N": N, "rho": rho, "trials": len(g),
            "median_E_R_deg": float(np.median([r.E_R_deg for r in g])),
            "median_E_t": float(np.median([r.E_t for r in g])),
            "median_time_ms": float(np.median([r.time_ms for r in g])),
            "success_rate": sum(ok) / len(g),
        })
    return out


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def rows_from_csv(text: str) -> list[Row]:
    rd = csv.reader(io.StringIO(text))
    header = tuple(next(rd))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected header {header}")
    return [Row(c[0], int(c[1]), float(c[2]), int(c[3]), float(c[4]), float(c[5]), int(c[6]),
                float(c[7]), float(c[8]), float(c[9]), float(c[10])) for c in rd]


def format_summary(summary: list[dict]) -> str:
    lines = ["  ".join(f"{h:>14s}" for h in SUMMARY_HEADER)]
    for s in summary:
        lines.append("  ".join([
            f"{s['method']:>14s}", f"{s['N']:>14d}", f"{s['rho']:>14g}", f"{s['trials']:>14d}",
            f"{s['median_E_R_deg']:>14.4f}", f"{s['median_E_t']:>14.5f}",
            f"{s['median_time_ms']:>14.1f}", f"{s['success_rate']:>14.2f}"]))
    return "\n".join(lines)
