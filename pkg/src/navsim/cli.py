"""Command-line front end.

Subcommands::

    navsim run --config FILE [--out PATH] [--dt F] [--duration F] [--plot]
    navsim compare --config FILE [--out PATH] [--dt F] [--duration F] [--plot]
    navsim oracle-check
    navsim residuals --config FILE

Exit codes: 0 success, 1 oracle-check failure, 2 configuration error,
3 numerical abort (NaN or polar singularity, reported with its epoch).
The NAVSIM_THREADS environment variable caps how many runs ``compare``
executes concurrently.
"""

import argparse
import sys
from pathlib import Path

from . import analysis, report
from .config import ConfigError, load_config
from .navigator import NavAbort, compare, run

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="navsim",
        description="Strapdown inertial navigation update-algorithm simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--dt", type=float, help="override the update interval (s)")
        p.add_argument("--duration", type=float, help="override the duration (s)")
        p.add_argument(
            "--plot", action="store_true", help="also render an SVG figure"
        )

    add_common(sub.add_parser("run", help="run one algorithm pair, write error CSV"))
    add_common(
        sub.add_parser("compare", help="run the configured algorithm list, rank them")
    )
    sub.add_parser("oracle-check", help="check algorithms against step oracles")
    residuals = sub.add_parser(
        "residuals", help="evaluate scenario assumption residuals"
    )
    residuals.add_argument("--config", required=True, help="scenario config file")
    return parser


def _load(args):
    return load_config(args.config, dt_override=args.dt, duration_override=args.duration)


def _resolve_out(args, cfg, default_name):
    if args.out:
        return Path(args.out)
    if cfg.csv_path:
        return Path(cfg.csv_path)
    return Path(default_name)


def _plot_path(args, cfg, csv_path: Path) -> Path | None:
    if not (args.plot or cfg.plot):
        return None
    if cfg.plot_path:
        return Path(cfg.plot_path)
    return csv_path.with_suffix(".svg")


def _cmd_run(args) -> int:
    cfg = _load(args)
    result = run(cfg.run_config())
    csv_path = _resolve_out(args, cfg, "errors.csv")
    report.write_error_csv(csv_path, result)
    print(
        f"{cfg.vel_alg.value}/{cfg.pos_alg.value}: {len(result.t)} epochs, "
        f"max horizontal position error {result.max_horiz_pos_err:.6g} m -> {csv_path}"
    )
    svg = _plot_path(args, cfg, csv_path)
    if svg is not None:
        report.plot_run(svg, result)
        print(f"figure -> {svg}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = _load(args)
    if not cfg.compare_algorithms:
        raise ConfigError("[compare] algorithms list is empty")
    table, results = compare(cfg.compare_configs())
    csv_path = _resolve_out(args, cfg, "compare.csv")
    report.write_compare_csv(csv_path, table)
    for row in table:
        print(
            f"{row.rank}. {row.algorithm:8s} max pos err {row.max_horiz_pos_err:.6g} m, "
            f"max vel err {row.max_horiz_vel_err:.6g} m/s"
        )
    print(f"ranking -> {csv_path}")
    svg = _plot_path(args, cfg, csv_path)
    if svg is not None:
        report.plot_compare(svg, results)
        print(f"figure -> {svg}")
    return EXIT_OK


def _cmd_oracle_check() -> int:
    failed = 0
    for label, rows in analysis.standard_oracle_suite():
        print(f"[{label}]")
        for row in rows:
            status = "PASS" if row.passed else "FAIL"
            failed += not row.passed
            print(
                f"  {status} {row.quantity:8s} {row.algorithm:8s} order dt^{row.order} "
                f"|dev| {row.actual:.3e} vs closed form {row.expected:.3e} "
                f"(ratio {row.ratio:.3f})"
            )
    if failed:
        print(f"{failed} oracle row(s) failed")
        return EXIT_CHECK_FAILED
    print("all oracle rows pass")
    return EXIT_OK


def _cmd_residuals(args) -> int:
    cfg = load_config(args.config)
    res = analysis.assumption_residuals(cfg.scenario)
    print(f"scenario: {cfg.scenario.kind.value}, {cfg.scenario.duration:g} s")
    print(f"max |omega_in|            {res.max_omega_in_norm:.6e} rad/s")
    print(f"max const-rotation resid  {res.max_const_rotation:.6e} rad^2/s^2")
    print(f"max ramp-force resid      {res.max_ramp_force:.6e} m/s^3")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "oracle-check":
            return _cmd_oracle_check()
        return _cmd_residuals(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NavAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
