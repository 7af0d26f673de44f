"""Command line: ``register``, ``synth`` and ``bench`` subcommands."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import BenchConfig, check_methods, format_summary, rows_to_csv, run_bench, summarize
from .core import PipelineConfig, RegistrationSignal
from .evaluation import Thresholds
from .io import ParseError, read_correspondences, read_points, write_correspondences, \
    write_ground_truth, write_pose
from .pipeline import register
from .synth import SynthConfig, generate


def _csv_list(kind):
    def parse(text: str):
        try:
            return tuple(kind(v) for v in text.split(",") if v.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def _add_pipeline_flags(p: argparse.ArgumentParser, xi_required: bool) -> None:
    p.add_argument("--xi", type=float, required=xi_required, default=0.02,
                   help="inlier threshold in scene units")
    p.add_argument("--kt", type=int, default=15, help="stage-I sample count")
    p.add_argument("--m", type=int, default=2, help="surfaces per shell")
    p.add_argument("--kr", type=int, default=8, help="stage-II sample count")
    p.add_argument("--n", type=int, default=2, help="half-circles per girdle")
    p.add_argument("--psi", type=float, default=1e-3, help="minimal branch width")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-verify", action="store_true",
                   help="skip compatibility verification of stabbing candidates")
    p.add_argument("--sampling", choices=("valid", "random", "score"), default="valid")


def _pipeline_config(args) -> PipelineConfig:
    return PipelineConfig(xi=args.xi, k_t=args.kt, m=args.m, k_r=args.kr, n=args.n, psi=args.psi,
                          seed=args.seed, use_verification=not args.no_verify,
                          sampling=args.sampling)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="herereg",
                                     description="Robust rigid registration from correspondences.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("register", help="estimate the transform of a correspondence file")
    p.add_argument("--corr", required=True, help="correspondence file (x1 x2 x3 y1 y2 y3 per line)")
    _add_pipeline_flags(p, xi_required=True)
    p.add_argument("--out", help="pose JSON path (default: stdout)")
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("synth", help="write a synthetic correspondence file and its ground truth")
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--rho", type=float, default=0.9)
    p.add_argument("--noise-radius", type=float, default=0.02)
    p.add_argument("--outlier-radius", type=float, default=5.0)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", help="source cloud file (x1 x2 x3 per line) instead of the unit cube")
    p.add_argument("--out", required=True, help="correspondence file to write")
    p.add_argument("--truth", help="ground-truth sidecar (default: <out>.truth.json)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="Monte-Carlo grid over N and rho")
    _add_pipeline_flags(p, xi_required=False)
    p.add_argument("--grid-n", type=_csv_list(int), default=(1000,), help="comma list of N")
    p.add_argument("--grid-rho", type=_csv_list(float), default=(0.9,), help="comma list of rho")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--methods", type=_csv_list(str), default=("here",),
                   help="comma list from here, here-noverify, ransac-<iters>[k]")
    p.add_argument("--noise-radius", type=float, default=0.02)
    p.add_argument("--max-rot-deg", type=float, default=5.0, help="success threshold on E_R")
    p.add_argument("--max-trans", type=float, default=0.1, help="success threshold on E_t")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--summary", help="summary table path (default: stderr)")
    p.set_defaults(func=cmd_bench)
    return parser


def cmd_register(args) -> int:
    cset = read_correspondences(args.corr)
    report = register(cset, _pipeline_config(args))
    extra = {"stage_sizes": list(report.stage_sizes),
             "stage_times": list(report.stage_times),
             "signals": list(report.signals),
             "config": report.to_dict()["config"]}
    if args.out:
        write_pose(args.out, report.transform, report.consensus, extra)
    else:
        doc = report.to_dict()
        json.dump(doc, sys.stdout, indent=1)
        sys.stdout.write("\n")
    print(f"consensus {len(report.consensus)}/{cset.N}, stages {report.stage_sizes}",
          file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    source = read_points(args.source) if args.source else None
    N = source.shape[0] if source is not None else args.N
    cfg = SynthConfig(N=N, rho=args.rho, noise_radius=args.noise_radius,
                      outlier_radius=args.outlier_radius, t_max=args.t_max, seed=args.seed)
    cset, gt, mask = generate(cfg, source=source)
    write_correspondences(args.out, cset)
    truth = args.truth or str(Path(args.out)) + ".truth.json"
    write_ground_truth(truth, gt, mask)
    return 0


def cmd_bench(args) -> int:
    check_methods(args.methods)
    thresholds = Thresholds(args.max_rot_deg, args.max_trans)
    cfg = BenchConfig(grid_n=args.grid_n, grid_rho=args.grid_rho, trials=args.trials,
                      methods=args.methods, xi=args.xi, noise_radius=args.noise_radius,
                      seed=args.seed, pipeline=_pipeline_config(args), thresholds=thresholds)
    rows, _ = run_bench(cfg)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    table = format_summary(summarize(rows, thresholds)) + "\n"
    if args.summary:
        Path(args.summary).write_text(table, encoding="utf-8")
    else:
        sys.stderr.write(table)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except RegistrationSignal as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
