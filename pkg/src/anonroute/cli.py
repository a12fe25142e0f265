"""Command-line driver: ``run`` one trial, ``sweep`` a grid, ``render`` plot data.

Exit codes: 0 on success, 1 for invalid arguments or parameters, 2 for
runtime and I/O failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiment as ex
from .engine import export_dot, run_trial
from .metrics import evaluate
from .world import ConfigError, WorldConfig, n_star_from_ratio, sample_deployment

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anonroute", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate a single trial")
    run.add_argument("--n", type=int, required=True)
    grp = run.add_mutually_exclusive_group(required=True)
    grp.add_argument("--ratio", type=float)
    grp.add_argument("--n-star", type=int, dest="n_star")
    run.add_argument("--f", type=float, required=True)
    run.add_argument("--nr", type=float, required=True)
    run.add_argument("--seed", type=int, required=True)
    run.add_argument("--R", type=float, default=1.0)
    run.add_argument("--b0", type=float, default=1.0)
    run.add_argument("--v", type=float, default=1.0)
    run.add_argument("--dot", type=Path)
    run.add_argument("--trace", type=Path)
    run.add_argument("--finite-speed", action="store_true")

    sw = sub.add_parser("sweep", help="run a parameter sweep and write results.csv")
    src = sw.add_mutually_exclusive_group(required=True)
    src.add_argument("--paper-defaults", action="store_true")
    src.add_argument("--spec", type=Path)
    sw.add_argument("--trials", type=int)
    sw.add_argument("--jobs", type=int)
    sw.add_argument("--seed", type=int, help="override the base seed")
    sw.add_argument("--out", type=Path, default=Path("results.csv"))
    sw.add_argument("--only", help="grid filter such as f=0.1,nr=13")
    sw.add_argument("--plots", type=Path, help="also write plot data into this directory")
    sw.add_argument("--per-trial", type=Path, help="JSON-lines dump of every trial")

    rd = sub.add_parser("render", help="turn results.csv into plot-data files")
    rd.add_argument("--results", type=Path, required=True)
    rd.add_argument("--out", type=Path, required=True)
    return p


def cmd_run(args) -> int:
    if args.ratio is not None:
        n_star = n_star_from_ratio(args.ratio, args.n)
        if args.ratio > 1:
            raise ConfigError(f"ratio {args.ratio} gives more sources than sensors")
    else:
        n_star = args.n_star
    cfg = WorldConfig(R=args.R, B0=args.b0, v=args.v, n=args.n, n_star=n_star, f=args.f,
                      n_r=args.nr, seed=args.seed, finite_speed=args.finite_speed)
    dep = sample_deployment(cfg)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            outcome = run_trial(dep, trace=fh)
    else:
        outcome = run_trial(dep)
    if args.dot:
        args.dot.write_text(export_dot(outcome, dep), encoding="utf-8")
    print(evaluate(outcome).to_json())
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = ex.default_paper_spec() if args.paper_defaults else ex.load_spec(args.spec)
    if args.trials is not None:
        spec.trials = args.trials
    if args.jobs is not None:
        spec.jobs = args.jobs
    if args.seed is not None:
        spec.base_seed = args.seed
    if args.only:
        spec = ex.apply_filter(spec, ex.parse_filter(args.only))
    spec.validate()
    if args.per_trial:
        with open(args.per_trial, "w", encoding="utf-8") as fh:
            rows = ex.run_sweep(spec, per_trial=fh)
    else:
        rows = ex.run_sweep(spec)
    args.out.write_text(ex.emit_csv(rows), encoding="utf-8")
    summary = {"rows": len(rows), "trials": spec.trials, "out": str(args.out)}
    if args.plots:
        summary["plots"] = len(ex.emit_plot_data(rows, args.plots))
    print(json.dumps(summary))
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        rows = ex.read_csv(args.results)
    except ValueError as exc:
        raise OSError(f"{args.results}: {exc}") from None
    written = ex.emit_plot_data(rows, args.out)
    print(json.dumps({"files": len(written), "out": str(args.out)}))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    handler = {"run": cmd_run, "sweep": cmd_sweep, "render": cmd_render}[args.command]
    try:
        return handler(args)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"anonroute {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        print(f"anonroute {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
