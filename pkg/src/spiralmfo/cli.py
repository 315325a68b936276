"""Command-line entry point: ``spiralmfo <train|compare|sweep|timing|spirals>``."""

from __future__ import annotations

import argparse
import logging
import sys

from .exceptions import SpiralMfoError
from .experiment import (
    ExperimentConfig,
    SweepPlan,
    emit_spiral_traces,
    load_config,
    run_experiment,
    run_sweep,
    run_timing,
    run_train,
)
from .spirals import SpiralKernel, SpiralKind


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--seed", type=int, help="base seed (overrides config)")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--runs", type=int, help="repeated runs per optimizer")
    p.add_argument("--iterations", type=int, help="iterations per run")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spiralmfo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="single run of one optimizer")
    _common(p)
    p.add_argument("--optimizer", help="roster entry to run (default: first)")

    p = sub.add_parser("compare", help="repeated runs of the whole roster + report")
    _common(p)

    p = sub.add_parser("sweep", help="16-experiment sensitivity sweep")
    _common(p)

    p = sub.add_parser("timing", help="training / inference wall-clock table")
    _common(p)
    p.add_argument("--repeats", type=int, default=3)

    p = sub.add_parser("spirals", help="export spiral traces as CSV")
    _common(p)
    p.add_argument("--kernels", nargs="*", default=None, help="LMFO names (default: all six)")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--t-stop", type=float, default=3.0)
    p.add_argument("--samples", type=int, default=301)
    return parser


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    return cfg.override(seed=args.seed, runs=args.runs, iterations=args.iterations, out=args.out)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    cmd = args.command
    if cmd == "spirals":
        names = args.kernels or [k.lmfo_name for k in SpiralKind]
        kernels = [SpiralKernel(SpiralKind.from_lmfo(n), args.q) for n in names]
        paths = emit_spiral_traces(
            kernels, args.t_start, args.t_stop, args.samples,
            out_dir=args.out or "spirals", seed=args.seed or 0,
        )
        for path in paths:
            print(path)
        return 0

    cfg = _config(args)
    if cmd == "train":
        rec = run_train(cfg, optimizer=args.optimizer)
        print(f"algorithm={rec.algorithm} seed={rec.seed} loss={rec.best_fitness!r} "
              f"rate={rec.classification_rate!r} wall_ms={rec.wall_ms:.1f}")
    elif cmd == "compare":
        result = run_experiment(cfg)
        print(result.report.to_text())
    elif cmd == "sweep":
        rows = run_sweep(SweepPlan(), cfg)
        best = min(rows, key=lambda r: r.loss)
        for r in rows:
            print(f"{r.experiment:2d} n_layer={r.n_layer} q={r.q:g} n_batch={r.n_batch} loss={r.loss:.6g}")
        print(f"best: experiment {best.experiment} (n_layer={best.n_layer}, q={best.q:g}, n_batch={best.n_batch})")
    elif cmd == "timing":
        for r in run_timing(cfg, repeats=args.repeats):
            print(f"{r.model},{r.phase},{r.wall_ms:.4f}")
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except (SpiralMfoError, OSError, KeyError) as exc:
        message = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
