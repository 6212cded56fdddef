"""Command-line surface: bound computation, growth scans, simulation, duality checks.

Four subcommands, all with machine-readable output:

* ``bounds``   -- lower/upper bound constants and the equalization certificate
* ``scan``     -- certificate curve over an x-grid as a plottable table
* ``simulate`` -- seeded Monte Carlo of scaled longest-chain lengths
* ``verify``   -- maximal-chain counting vs. the exact-expectation integral

Output formats: a human key/value table (default; ``scan`` defaults to its
CSV table), ``--json`` (one object per line carrying schema_version and a
flat payload), ``--csv`` (17 significant digits, dot decimal separator).
Identical invocations produce byte-identical stdout, independent of
``--threads``.  Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Any, Mapping

from .bounds import SolverConfig, X_LEFT, X_RIGHT, bar_x, q_curve
from .chains import count_maximal_chains, expected_count_integral_mc, sample_cloud
from .errors import DomainError, NumericalError
from .harness import ExperimentSpec, bound_band_check, derive_rep_seed, run_experiment, stream

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _fmt17(v: float) -> str:
    return format(float(v), ".17g")


def _csv_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt17(v)
    return str(v)


def _emit(fmt: str, command: str, payload: Mapping[str, Any], out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        line = json.dumps({"schema_version": SCHEMA_VERSION, "command": command, "payload": dict(payload)})
        out.write(line + "\n")
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(payload.keys())
        writer.writerow([_csv_cell(v) for v in payload.values()])
    else:
        width = max(len(k) for k in payload)
        for k, v in payload.items():
            out.write(f"{k:<{width}}  {v}\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        root_tol=args.root_tol,
        max_iter=args.max_iter,
        x_grid_points=args.grid_points,
        bracket_growth=args.bracket_growth,
    )


def _resolve_threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        if args.threads < 0:
            raise DomainError("--threads must be >= 0 (0 = auto)")
        return args.threads
    env = os.environ.get("CHAINBOUNDS_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise DomainError(f"CHAINBOUNDS_THREADS={env!r} is not an integer") from None
        if value < 0:
            raise DomainError("CHAINBOUNDS_THREADS must be >= 0 (0 = auto)")
        return value
    return 0


def cmd_bounds(args: argparse.Namespace) -> int:
    if args.dim < 2:
        raise DomainError("bounds requires --dim >= 2")
    report = bar_x(args.dim, _solver_config(args))
    cert = report.certificate
    payload = {
        "t": report.t,
        "bw_lower": report.bw_lower,
        "bar_x": report.bar_x,
        "a_star": cert.a,
        "b_star": cert.b,
        "u_star": cert.u,
        "q": cert.q,
        "growth": cert.growth,
        "residual": report.residuals,
        "at_left_edge": report.at_left_edge,
        "multiple_crossings": report.multiple_crossings,
    }
    _emit(args.format, "bounds", payload)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    if args.dim < 2:
        raise DomainError("scan requires --dim >= 2")
    if args.steps < 2:
        raise DomainError("scan requires --steps >= 2")
    slack = 1e-12
    if args.x_min < X_LEFT - slack or args.x_max > X_RIGHT + slack or args.x_min >= args.x_max:
        raise DomainError(
            f"scan domain must satisfy {X_LEFT!r} <= x-min < x-max <= {X_RIGHT!r}"
        )
    step = (args.x_max - args.x_min) / (args.steps - 1)
    xs = [args.x_min + k * step for k in range(args.steps)]
    xs[-1] = args.x_max
    evs = q_curve(args.dim, xs, _solver_config(args))
    out = sys.stdout
    if args.format == "json":
        for ev in evs:
            _emit(
                "json",
                "scan",
                {"x": ev.x, "a": ev.a, "b": ev.b, "u": ev.u, "q": ev.q, "growth": ev.growth},
            )
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["x", "a", "b", "u", "q", "growth"])
        for ev in evs:
            writer.writerow([_fmt17(v) for v in (ev.x, ev.a, ev.b, ev.u, ev.q, ev.growth)])
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = ExperimentSpec(
        t=args.dim, n=args.points, reps=args.reps, master_seed=args.seed, algorithm=args.algo
    )
    if args.per_rep and args.format != "json":
        raise DomainError("--per-rep streams JSON lines and requires --json")
    threads = _resolve_threads(args)
    show_progress = sys.stderr.isatty()

    def on_result(i, res):
        if args.per_rep:
            _emit("json", "simulate", {"rep": i, "length": res.length, "ratio": res.ratio})
        if show_progress:
            print(f"rep {i + 1}/{spec.reps} done (ratio {res.ratio:.6f})", file=sys.stderr)

    result = run_experiment(spec, threads=threads, on_result=on_result)
    payload = {
        "t": spec.t,
        "n": spec.n,
        "reps": spec.reps,
        "seed": spec.master_seed,
        "algorithm": spec.algorithm,
        "mean_ratio": result.mean_ratio,
        "std_dev": result.std_dev,
        "ci95": result.ci95,
        "min_ratio": result.min_ratio,
        "max_ratio": result.max_ratio,
    }
    if args.check_bounds:
        if spec.t < 2:
            raise DomainError("--check-bounds requires --dim >= 2")
        verdict = bound_band_check(result, bar_x(spec.t))
        payload.update(
            {
                "bar_x": verdict.bar_x,
                "bw_lower": verdict.bw_lower,
                "lower_fraction": verdict.lower_fraction,
                "max_below_upper": verdict.max_below_upper,
                "mean_above_lower": verdict.mean_above_lower,
                "upper_margin": verdict.upper_margin,
                "lower_margin": verdict.lower_margin,
            }
        )
    _emit(args.format, "simulate", payload)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    n, t, ell, reps = args.points, args.dim, args.ell, args.reps
    if n > 14:
        raise DomainError("verify requires --points <= 14 (exhaustive counting side)")
    if not 1 <= ell <= n:
        raise DomainError(f"verify requires 1 <= ell <= n, got ell={ell}, n={n}")
    if reps < 1:
        raise DomainError("verify requires --reps >= 1")
    if t < 1:
        raise DomainError("verify requires --dim >= 1")
    # counting estimator: one cloud per replication on its own derived stream
    mean = 0.0
    m2 = 0.0
    for i in range(reps):
        cloud = sample_cloud(n, t, stream(derive_rep_seed(args.seed, i)))
        c = float(count_maximal_chains(cloud, ell).count)
        delta = c - mean
        mean += delta / (i + 1)
        m2 += delta * (c - mean)
    count_se = (m2 / (reps - 1) / reps) ** 0.5 if reps > 1 else 0.0
    integral, integral_se = expected_count_integral_mc(
        n, t, ell, reps, stream(derive_rep_seed(args.seed, reps))
    )
    gap = abs(mean - integral)
    combined = (count_se**2 + integral_se**2) ** 0.5
    if combined == 0.0:
        if gap != 0.0:
            raise NumericalError(
                f"estimators disagree ({mean} vs {integral}) with zero combined variance"
            )
        z = 0.0
    else:
        z = gap / combined
    _emit(
        args.format,
        "verify",
        {
            "t": t,
            "n": n,
            "ell": ell,
            "reps": reps,
            "seed": args.seed,
            "count_estimate": mean,
            "count_se": count_se,
            "integral_estimate": integral,
            "integral_se": integral_se,
            "z_score": z,
        },
    )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON-lines output")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output")
    common.set_defaults(format="human")
    common.add_argument("--seed", type=_u64, default=0, help="64-bit master seed (default 0)")
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads, 0 = auto (default: CHAINBOUNDS_THREADS or auto)",
    )

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--root-tol", type=float, default=1e-10, help="solver residual tolerance")
    solver.add_argument("--max-iter", type=int, default=200, help="bisection iteration cap")
    solver.add_argument("--grid-points", type=int, default=4096, help="x-scan grid resolution")
    solver.add_argument("--bracket-growth", type=float, default=2.0, help="bracket expansion factor")

    parser = argparse.ArgumentParser(
        prog="chainbounds",
        description="Bounds and Monte Carlo experiments for longest chains in [0,1]^t",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common, solver], help="bound constants for one dimension")
    p.add_argument("--dim", type=int, required=True, help="dimension t >= 2")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("scan", parents=[common, solver], help="certificate curve over an x-grid")
    p.add_argument("--dim", type=int, required=True, help="dimension t >= 2")
    p.add_argument("--x-min", type=float, default=X_LEFT, help="grid start (default e^-gamma)")
    p.add_argument("--x-max", type=float, default=X_RIGHT, help="grid end (default e)")
    p.add_argument("--steps", type=int, default=257, help="number of grid rows (default 257)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo scaled longest chains")
    p.add_argument("--dim", type=int, required=True, help="dimension t >= 1")
    p.add_argument("--points", type=int, required=True, help="points per replication")
    p.add_argument("--reps", type=int, required=True, help="replication count")
    p.add_argument("--algo", choices=("auto", "quadratic", "patience"), default="auto")
    p.add_argument("--check-bounds", action="store_true", help="compare against the bound band")
    p.add_argument("--per-rep", action="store_true", help="stream one JSON line per replication")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="dual estimates of the expected maximal-chain count")
    p.add_argument("--dim", type=int, required=True, help="dimension t >= 1")
    p.add_argument("--points", type=int, required=True, help="points per cloud (n <= 14)")
    p.add_argument("--ell", type=int, required=True, help="chain length to count")
    p.add_argument("--reps", type=int, required=True, help="replications per estimator")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
