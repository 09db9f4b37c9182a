"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error. Reports go to files
or standard output; diagnostics and errors go to standard error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .errors import NotOriginalProject, OpennessError
from .ingest import fetch_remote, load_ghtorrent_dump, load_ndjson
from .report.builders import ALL_METRICS, build_dataset_report, build_project_report
from .report.charts import emit_charts
from .report.csv_out import emit_csv
from .report.json_out import emit_json

USAGE_ERROR = 1
DATA_ERROR = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's default 2
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="openness",
        description="Compute project-openness metrics from repository event data.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    analyze = subparsers.add_parser(
        "analyze",
        help="ingest a dataset and emit metric reports",
        description=(
            "Ingest repository event data (NDJSON stream, GHTorrent-style CSV "
            "dump, or a remote repository) and emit community composition, "
            "external contribution, and promotion metrics."
        ),
    )
    analyze.add_argument("--input", required=True, help="path to the dataset, or owner/name with --format remote")
    analyze.add_argument("--format", required=True, choices=["ndjson", "ghtorrent", "remote"], dest="input_format")
    analyze.add_argument("--token", default=None, help="API token (defaults to $OPENNESS_TOKEN)")
    analyze.add_argument("--metric", default="all", choices=["m1", "m2", "m3", "all"])
    analyze.add_argument("--project", default=None, help="restrict the report to one owner/name project")
    analyze.add_argument("--out", default="-", help="JSON report destination path, or - for stdout")
    analyze.add_argument("--charts", default=None, metavar="DIR", help="write SVG charts and an index page here")
    analyze.add_argument("--csv", default=None, metavar="DIR", help="write CSV reports here")
    analyze.add_argument("--strict", action="store_true", help="abort on the first schema/join error")
    analyze.add_argument("--pooled", action="store_true", help="aggregate M2 per pull request instead of per project")
    analyze.add_argument(
        "--role-at-pr-time",
        action="store_true",
        help="evaluate PR author roles at each PR's opening instant instead of over the whole history",
    )
    analyze.add_argument(
        "--strict-management",
        action="store_true",
        help="count closing one's own issue/PR as a management action",
    )
    return parser


def _load_store(args: argparse.Namespace):
    if args.input_format == "ndjson":
        return load_ndjson(args.input, strict=args.strict)
    if args.input_format == "ghtorrent":
        return load_ghtorrent_dump(args.input, strict=args.strict)
    return fetch_remote(args.input, auth=args.token)


def run_cli(argv: Sequence[str]) -> int:
    """Parse arguments, run the pipeline, and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.charts and args.project:
            raise _UsageError("--charts requires a dataset report (drop --project)")
    except _UsageError as exc:
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"openness: error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    metrics = ALL_METRICS if args.metric == "all" else frozenset({args.metric})
    try:
        store = _load_store(args)
    except FileNotFoundError as exc:
        print(f"openness: error: input not found: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OpennessError as exc:
        print(f"openness: error: {exc}", file=sys.stderr)
        return DATA_ERROR

    for diagnostic in store.diagnostics:
        location = f" (line {diagnostic.line_number})" if diagnostic.line_number else ""
        print(f"openness: {diagnostic.kind}{location}: {diagnostic.message}", file=sys.stderr)

    try:
        if args.project:
            project = store.project_by_name(args.project)
            if project is None:
                raise OpennessError(f"project {args.project!r} not found in the input")
            report = build_project_report(
                project,
                store,
                metrics=metrics,
                strict_management=args.strict_management,
                role_at_pr_time=args.role_at_pr_time,
            )
        else:
            report = build_dataset_report(
                store,
                metrics=metrics,
                strict_management=args.strict_management,
                role_at_pr_time=args.role_at_pr_time,
                pooled=args.pooled,
            )
    except NotOriginalProject as exc:
        print(f"openness: error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OpennessError as exc:
        print(f"openness: error: {exc}", file=sys.stderr)
        return DATA_ERROR

    try:
        emit_json(report, args.out if args.out == "-" else Path(args.out))
        if args.csv:
            emit_csv(report, Path(args.csv))
        if args.charts:
            emit_charts(report, Path(args.charts))
    except OSError as exc:
        print(f"openness: error: cannot write output: {exc}", file=sys.stderr)
        return DATA_ERROR
    return 0


def main() -> int:
    return run_cli(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
