"""Command-line interface.

Subcommands::

    boostcg run <config>         single-solver experiment (exactly one solver)
    boostcg compare <config>     multi-solver comparison (one or more solvers)
    boostcg verify <suite...>    run named invariant suites
    boostcg thetas <trace-dir>   recompute theta tables from *_rounds.csv files

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 suite failure.
"""

import argparse
import sys

from .bench import (ConfigError, apply_overrides, available_suites,
                    load_config, run_experiment, thetas_from_dir, verify_suite)
from .core import OptError


def _add_run_flags(parser):
    parser.add_argument("config", help="experiment config file")
    parser.add_argument("--seed", type=int, help="override the run seed")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--budget-iters", type=int, help="override the iteration budget")
    parser.add_argument("--budget-seconds", type=float, help="override the wall budget")
    parser.add_argument("--delta", type=float,
                        help="override the pursuit alignment threshold")
    parser.add_argument("--max-rounds", type=int,
                        help="override the pursuit round cap (0 = unbounded)")
    parser.add_argument("--step-rule", choices=("agnostic", "short", "ls"),
                        help="override every solver's step rule")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="boostcg",
        description="Projection-free solver benchmarks over linear "
                    "minimization oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a single-solver experiment")
    _add_run_flags(run_p)

    cmp_p = sub.add_parser("compare", help="run a multi-solver comparison")
    _add_run_flags(cmp_p)

    ver_p = sub.add_parser("verify", help="run invariant suites")
    ver_p.add_argument("suites", nargs="+",
                       help="suite names (available: %s)" % ", ".join(available_suites()))

    th_p = sub.add_parser("thetas", help="recompute theta tables from rounds CSVs")
    th_p.add_argument("trace_dir", help="directory holding *_rounds.csv files")
    return parser


def _load_with_overrides(args):
    cfg = load_config(args.config)
    return apply_overrides(cfg, seed=args.seed, out=args.out,
                           budget_iters=args.budget_iters,
                           budget_seconds=args.budget_seconds,
                           delta=args.delta, max_rounds=args.max_rounds,
                           step_rule=args.step_rule)


def _print_report(report):
    for name, trace in report.traces.items():
        print("%s: status=%s f=%.10g gap=%.10g oracle_calls=%d rows=%d"
              % (name, trace.status, trace.final_f, trace.final_gap,
                 trace.total_oracle_calls, len(trace.rows)))
    for name, message in report.failed.items():
        print("%s: FAILED (%s)" % (name, message))
    for name, path in report.csv_paths.items():
        print("wrote %s" % path)
    for path in list(report.rounds_paths.values()) + list(report.theta_paths.values()):
        print("wrote %s" % path)
    if report.figure_path:
        print("wrote %s" % report.figure_path)


def _cmd_run(args):
    cfg = _load_with_overrides(args)
    if len(cfg.solvers) != 1:
        raise ConfigError("run takes exactly one [solver:<name>] section; "
                          "use compare for %d solvers" % len(cfg.solvers))
    report = run_experiment(cfg)
    _print_report(report)
    return 2 if report.failed else 0


def _cmd_compare(args):
    cfg = _load_with_overrides(args)
    report = run_experiment(cfg)
    _print_report(report)
    return 2 if report.failed else 0


def _cmd_verify(args):
    results = verify_suite(args.suites)
    worst = 0
    for result in results:
        print("%s: %s (%s)" % (result.name, "pass" if result.passed else "FAIL",
                               result.detail))
        if not result.passed:
            worst = 3
    return worst


def _cmd_thetas(args):
    tables = thetas_from_dir(args.trace_dir)
    for name in sorted(tables):
        print("%s:" % name)
        print("  k  mean         std          count  excluded")
        for row in tables[name]:
            print("  %-2d %-12.6g %-12.6g %-6d %d"
                  % (row.k, row.mean, row.std, row.count, row.excluded))
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    handlers = {"run": _cmd_run, "compare": _cmd_compare,
                "verify": _cmd_verify, "thetas": _cmd_thetas}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 1
    except OptError as exc:
        print("runtime error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
