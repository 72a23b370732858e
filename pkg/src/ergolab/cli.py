"""Command-line front end: one subcommand per experiment.

Flags override values from an optional ``--config`` file (flat
``key = value`` lines, same keys as the flags).  When ``--threshold`` is
configured the exit status reports whether the experiment's headline
statistic met it.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, ErgolabError
from .harness import EXPERIMENTS, ExperimentConfig, parse_nlist, persist, run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergolab",
        description="forecasting-limits experiments on exact dynamical systems")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", default=None,
                       help="flat key = value config file; flags override")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--kmax", type=int, default=None)
        p.add_argument("--smax", type=int, default=None)
        p.add_argument("--nlist", type=str, default=None,
                       help="comma list and/or lo:hi ranges, e.g. 3:64")
        p.add_argument("--q-schedule", dest="q_schedule", type=str,
                       default=None, help="sqrt[:scale] | const:q | table:n=q,..")
        p.add_argument("--method", type=str, default=None,
                       help="exact:<mass tolerance> | mc:<trials>")
        p.add_argument("--predictor", type=str, default=None,
                       help="dynamic-count[:N] | static-count[:N] | constant:v")
        p.add_argument("--alpha", type=str, default=None,
                       help="rotation angle as d,a,b meaning a + b*sqrt(d)")
        p.add_argument("--out", type=str, default=None,
                       help="directory for config echo, CSV and plot data")
        p.add_argument("--threshold", type=float, default=None)
    return parser


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    config.experiment = args.experiment
    overrides = {
        "trials": args.trials,
        "seed": args.seed,
        "kmax": args.kmax,
        "smax": args.smax,
        "method": args.method,
        "predictor": args.predictor,
        "alpha": args.alpha,
        "out": args.out,
        "threshold": args.threshold,
        "q-schedule": args.q_schedule,
    }
    for key, value in overrides.items():
        if value is not None:
            config.set_key(key, str(value))
    if args.nlist is not None:
        config.nlist = parse_nlist(args.nlist)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args).validate()
        report = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ErgolabError as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 3

    print(f"experiment: {config.experiment}")
    print(json.dumps(report.summary, indent=2, default=str))
    if config.out:
        paths = persist(config, report, config.out)
        for kind, path in paths.items():
            print(f"wrote {kind}: {path}")
    if config.threshold is not None:
        ok = report.passed(config.threshold)
        rel = ">=" if report.stat_direction == "ge" else "<="
        print(f"threshold check: {report.stat!r} {rel} {config.threshold!r}"
              f" -> {'pass' if ok else 'FAIL'}")
        return 0 if ok else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
