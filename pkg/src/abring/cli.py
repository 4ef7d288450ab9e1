"""Command-line scenario runner.

Subcommands name the experiment; the rest of the scenario lives in a
YAML config.  Exit codes: 0 all embedded assertions passed, 2 some
assertion failed (outputs still written), 1 execution error.
"""

import argparse
import json
import sys

from .errors import AbringError
from .scenario import EXPERIMENTS, load_config, run_scenario


def build_parser():
    parser = argparse.ArgumentParser(
        prog="abring",
        description="Flux-driven quantum ring experiments: spectra, holonomy, propagation.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", required=True, help="YAML scenario config")
        cmd.add_argument("--out", default=None, help="output directory (default: from config)")
        cmd.add_argument(
            "--format",
            choices=["csv", "json", "both"],
            default=None,
            help="matrix/report output formats (default: from config)",
        )
        cmd.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-path config override, e.g. solver.dt=5e-4 (repeatable)",
        )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    formats = None
    if args.format is not None:
        formats = ["csv", "json"] if args.format == "both" else [args.format]
    try:
        config = load_config(args.config, overrides=args.override, experiment=args.experiment)
        report = run_scenario(config, out_dir=args.out, formats=formats)
    except (AbringError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for item in report["assertions"]:
        status = "PASS" if item["passed"] else "FAIL"
        print(f"[{status}] {item['name']}: {item['detail']}")
    print(json.dumps({"experiment": report["experiment"], "all_passed": report["all_passed"]}))
    return 0 if report["all_passed"] else 2


if __name__ == "__main__":
    sys.exit(main())
