"""CSV report emitter.

Writes one file per metric into a directory; numeric values carry full
precision (``repr`` of the float), matching the ``raw`` fields of the
JSON emitter exactly. Column layouts are documented in docs/formats.md.
"""

from __future__ import annotations

import csv
from pathlib import Path

from ..roles import ROLE_ORDER
from ..timeutil import format_timestamp
from .builders import DatasetReport


def _num(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(value)


def emit_csv(report: DatasetReport, out_dir: str | Path) -> list[Path]:
    """Write summary, composition, contribution and promotion CSV files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    path = out_dir / "summary.csv"
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["project_count", "original_project_count", "user_count", "issue_count", "pr_count", "commit_count"]
        )
        s = report.summary
        writer.writerow(
            [s.project_count, s.original_project_count, s.user_count, s.issue_count, s.pr_count, s.commit_count]
        )
    written.append(path)

    path = out_dir / "composition.csv"
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        header = ["project"]
        for role in ROLE_ORDER:
            header += [f"count_{role.value}", f"pct_{role.value}"]
        writer.writerow(header + ["total_users"])
        for project_report in report.per_project:
            comp = project_report.composition
            if comp is None:
                continue
            row = [project_report.project.full_name]
            for role in ROLE_ORDER:
                row += [comp.counts[role], _num(comp.percentages[role])]
            writer.writerow(row + [comp.total_users])
        if report.average_composition is not None:
            row = ["(average)"]
            for role in ROLE_ORDER:
                row += ["", _num(report.average_composition.percentages[role])]
            writer.writerow(row + [""])
    written.append(path)

    path = out_dir / "contribution.csv"
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "project",
                "total_external_prs",
                "accepted",
                "rejected",
                "pending_excluded",
                "acceptance_rate",
                "mean_decision_days",
            ]
        )
        for project_report in report.per_project:
            stats = project_report.contribution
            if stats is None:
                continue
            writer.writerow(
                [
                    project_report.project.full_name,
                    stats.total_external_prs,
                    stats.accepted,
                    stats.rejected,
                    stats.pending_excluded,
                    _num(stats.acceptance_rate),
                    _num(stats.mean_decision_days),
                ]
            )
        aggregate = report.aggregate_contribution
        if aggregate is not None:
            writer.writerow(
                [
                    "(average)",
                    "",
                    "",
                    "",
                    "",
                    _num(aggregate.mean_acceptance_rate),
                    _num(aggregate.mean_decision_days),
                ]
            )
    written.append(path)

    path = out_dir / "promotion.csv"
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["project", "login", "first_action_at", "first_management_at", "duration_days"])
        for project_report in report.per_project:
            stats = project_report.promotion
            if stats is None:
                continue
            for record in stats.records:
                writer.writerow(
                    [
                        project_report.project.full_name,
                        record.user.login,
                        format_timestamp(record.first_action_at),
                        format_timestamp(record.first_management_at),
                        _num(record.duration_days),
                    ]
                )
            if stats.mean_duration_days is not None:
                writer.writerow(
                    [project_report.project.full_name, "(mean)", "", "", _num(stats.mean_duration_days)]
                )
    written.append(path)
    return written
