"""Command-line interface: list the suite, run experiments, dump traces."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import benchmarks
from .geo import GeoConfig, run_geo
from .harness import (
    ALGORITHMS,
    ExperimentConfig,
    emit_results,
    emit_trace,
    failure_counts,
    run_experiment,
)
from .sgeo import default_config, run_sgeo


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoseek",
        description="Geodesic-flow global optimization benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="print the benchmark suite")

    run = sub.add_parser("run", help="run a seeded experiment over the suite")
    run.add_argument("--functions", default="all",
                     help="comma-separated registry names, or 'all'")
    run.add_argument("--seeds", type=int, default=10, help="seeds per function")
    run.add_argument("--algos", default="sgeo",
                     help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    run.add_argument("--no-qn", action="store_true",
                     help="ablation: disable quasi-Newton (200-step traces)")
    run.add_argument("--no-jump", action="store_true",
                     help="ablation: uniform restarts instead of jumps")
    run.add_argument("--out", default="results.csv", help="output file path")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--seed-base", type=int, default=0)
    run.add_argument("--plot", default=None, metavar="PATH",
                     help="also render a failure-count figure")

    trace = sub.add_parser("trace", help="trace one run and dump its rows")
    trace.add_argument("--function", required=True)
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--sgeo", action="store_true",
                       help="trace a full sequential run instead of one geodesic run")
    trace.add_argument("--steps", type=int, default=None,
                       help="steps per branch (geodesic-run mode)")
    trace.add_argument("--dt-lb", type=float, default=None,
                       help="step-size lower bound override (geodesic-run mode)")
    trace.add_argument("--out", default="trace.csv", help="trace CSV path")
    trace.add_argument("--plot", default=None, metavar="PATH",
                       help="also render the 2-D trajectory figure")
    return parser


def _cmd_list() -> int:
    print(f"{'name':<22}{'dim':>4}  {'box':<22}{'known_max':>14}  oscillatory")
    for spec in benchmarks.suite():
        box = f"[{spec.lower[0]:g}, {spec.upper[0]:g}]"
        if not (np.all(spec.lower == spec.lower[0]) and np.all(spec.upper == spec.upper[0])):
            box = "per-dimension"
        print(f"{spec.name:<22}{spec.dimension:>4}  {box:<22}"
              f"{spec.known_max:>14.6g}  {str(spec.oscillatory).lower()}")
    return 0


def _cmd_run(args) -> int:
    names = benchmarks.names() if args.functions == "all" else _split(args.functions)
    try:
        config = ExperimentConfig(
            functions=names,
            n_seeds=args.seeds,
            algorithms=_split(args.algos),
            seed_base=args.seed_base,
            no_qn=args.no_qn,
            no_jump=args.no_jump,
            workers=args.workers,
            out=args.out,
            fmt=args.format,
        )
        for name in names:
            benchmarks.get(name)
    except (ValueError, KeyError) as exc:
        print(f"geoseek: configuration error: {exc}", file=sys.stderr)
        return 2

    records = run_experiment(config)
    emit_results(records, args.out, args.format, config)
    print(f"wrote {len(records)} records to {args.out}")
    for (fn, algo), failures in sorted(failure_counts(records).items()):
        print(f"  {fn:<22} {algo:<15} failures {failures}/{args.seeds}")
    if args.plot:
        from .plotting import plot_failures

        plot_failures(records, args.plot)
        print(f"wrote failure-count figure to {args.plot}")
    return 0


def _cmd_trace(args) -> int:
    try:
        spec = benchmarks.get(args.function)
    except KeyError as exc:
        print(f"geoseek: configuration error: {exc}", file=sys.stderr)
        return 2

    objective = benchmarks.make_objective(spec)
    rng = np.random.default_rng([args.seed, 0x747261])  # independent trace stream
    sgeo_config = default_config(spec.lower, spec.upper, spec.dimension)
    x0 = rng.uniform(spec.lower, spec.upper)

    if args.sgeo:
        result = run_sgeo(objective, spec.lower, spec.upper, sgeo_config, rng,
                          collect_traces=True)
        rows = result.traces
        print(f"sgeo: phi_star {result.phi_star:.6g} after {len(result.history)} runs")
    else:
        geo_config = GeoConfig(
            steps=args.steps or sgeo_config.steps_per_run,
            t_qn=sgeo_config.t_qn,
            use_qn=sgeo_config.use_qn,
            dt_lb=args.dt_lb or sgeo_config.alpha * sgeo_config.dt_lb0,
            lower=spec.lower,
            upper=spec.upper,
            tol_f=sgeo_config.tol_f,
        )
        result = run_geo(objective, geo_config, x0, rng)
        rows = result.trace
        print(f"geo: phi_star {result.phi_star:.6g}, k={result.k}, "
              f"r_bar {result.r_bar:.4g}")

    emit_trace(rows, args.out)
    print(f"wrote {len(rows)} trace rows to {args.out}")
    if args.plot:
        if spec.dimension != 2:
            print("geoseek: --plot requires a 2-D function", file=sys.stderr)
            return 2
        from .plotting import plot_trace

        plot_trace(rows, args.plot, spec)
        print(f"wrote trajectory figure to {args.plot}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        return _cmd_list()
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "trace":
        return _cmd_trace(args)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
