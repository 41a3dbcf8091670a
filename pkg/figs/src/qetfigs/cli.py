"""Command-line figure rendering for simulator output files.

Exit codes: 0 success, 1 schema or data validation failure.
"""

from __future__ import annotations

import argparse
import sys

from .plots import plot_decay, plot_profile
from .readers import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qetfigs",
        description="Render figures from qetsim CSV/JSON outputs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    profile = sub.add_parser(
        "plot-profile", help="per-site energy profile before and after feedback"
    )
    profile.add_argument("--in", dest="csv_in", required=True, help="profile.csv path")
    profile.add_argument("--out", required=True, help="output image path")
    profile.add_argument("--dpi", type=int, default=150)
    profile.add_argument(
        "--report", default=None,
        help="optional report.json for exact window labels",
    )
    profile.set_defaults(fn=_run_profile)

    decay = sub.add_parser(
        "plot-decay", help="correlator and gain magnitudes versus distance"
    )
    decay.add_argument("--in", dest="csv_in", required=True, help="sweep.csv path")
    decay.add_argument("--out", required=True, help="output image path")
    decay.add_argument("--dpi", type=int, default=150)
    decay.set_defaults(fn=_run_decay)
    return parser


def _run_profile(args) -> int:
    plot_profile(args.csv_in, args.out, dpi=args.dpi, report_path=args.report)
    print(f"wrote {args.out}")
    return 0


def _run_decay(args) -> int:
    plot_decay(args.csv_in, args.out, dpi=args.dpi)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
