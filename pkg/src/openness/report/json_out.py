"""Deterministic JSON report emitter.

Keys are ordered lexicographically and every run over the same input
yields identical bytes. Day and percentage quantities are rendered as
``{"display": "...", "raw": ...}`` pairs: the display string is rounded
half-up to two decimals (percentages are scaled to 0-100), while ``raw``
keeps full precision for downstream tooling.
"""

from __future__ import annotations

import json
import sys
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Any, IO

from ..contrib import ContributionAggregate, ContributionStats
from ..model import DatasetSummary, ProjectRef
from ..promotion import PromotionStats
from ..roles import ROLE_ORDER, AverageComposition, CommunityComposition
from ..stats import BoxplotSummary
from ..timeutil import format_timestamp
from .builders import DatasetReport, ProjectReport


def _display(value: float) -> str:
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def days_field(value: float | None) -> dict[str, Any] | None:
    """Two-decimal day display plus raw value."""
    if value is None:
        return None
    return {"display": _display(value), "raw": value}


def percent_field(fraction: float | None) -> dict[str, Any] | None:
    """Fraction rendered as a percentage display plus raw fraction."""
    if fraction is None:
        return None
    return {"display": _display(fraction * 100.0), "raw": fraction}


def _project_ref(project: ProjectRef) -> dict[str, Any]:
    return {"project_id": project.project_id, "full_name": project.full_name}


def _composition(composition: CommunityComposition | None) -> dict[str, Any] | None:
    if composition is None:
        return None
    return {
        "counts": {role.value: composition.counts[role] for role in ROLE_ORDER},
        "percentages": {
            role.value: percent_field(composition.percentages[role]) for role in ROLE_ORDER
        },
        "total_users": composition.total_users,
    }


def _average_composition(average: AverageComposition | None) -> dict[str, Any] | None:
    if average is None:
        return None
    return {
        "percentages": {role.value: percent_field(average.percentages[role]) for role in ROLE_ORDER},
        "project_count": average.project_count,
    }


def _contribution(stats: ContributionStats | None) -> dict[str, Any] | None:
    if stats is None:
        return None
    return {
        "total_external_prs": stats.total_external_prs,
        "accepted": stats.accepted,
        "rejected": stats.rejected,
        "pending_excluded": stats.pending_excluded,
        "acceptance_rate": percent_field(stats.acceptance_rate),
        "mean_decision_days": days_field(stats.mean_decision_days),
    }


def _aggregate(aggregate: ContributionAggregate | None) -> dict[str, Any] | None:
    if aggregate is None:
        return None
    return {
        "mean_acceptance_rate": percent_field(aggregate.mean_acceptance_rate),
        "mean_decision_days": days_field(aggregate.mean_decision_days),
        "projects_included": aggregate.projects_included,
        "projects_skipped": aggregate.projects_skipped,
        "pooled": aggregate.pooled,
    }


def _promotion(stats: PromotionStats | None) -> dict[str, Any] | None:
    if stats is None:
        return None
    return {
        "mean_duration_days": days_field(stats.mean_duration_days),
        "records": [
            {
                "user_id": record.user.user_id,
                "login": record.user.login,
                "first_action_at": format_timestamp(record.first_action_at),
                "first_management_at": format_timestamp(record.first_management_at),
                "duration_days": days_field(record.duration_days),
            }
            for record in stats.records
        ],
    }


def _boxplot(summary: BoxplotSummary | None) -> dict[str, Any] | None:
    if summary is None:
        return None
    return {
        "n": summary.n,
        "min": days_field(summary.min),
        "q1": days_field(summary.q1),
        "median": days_field(summary.median),
        "q3": days_field(summary.q3),
        "max": days_field(summary.max),
        "iqr": days_field(summary.iqr),
        "whisker_low": days_field(summary.whisker_low),
        "whisker_high": days_field(summary.whisker_high),
        "outliers": [
            {"label": label, "value": days_field(value)} for label, value in summary.outliers
        ],
        "above_box": [
            {"label": label, "value": days_field(value)} for label, value in summary.above_box
        ],
    }


def _summary(summary: DatasetSummary) -> dict[str, Any]:
    return {
        "project_count": summary.project_count,
        "original_project_count": summary.original_project_count,
        "user_count": summary.user_count,
        "issue_count": summary.issue_count,
        "pr_count": summary.pr_count,
        "commit_count": summary.commit_count,
    }


def project_report_payload(report: ProjectReport) -> dict[str, Any]:
    return {
        "report_type": "project",
        "project": _project_ref(report.project),
        "composition": _composition(report.composition),
        "contribution": _contribution(report.contribution),
        "promotion": _promotion(report.promotion),
        "generated_at": format_timestamp(report.generated_at),
        "tool_version": report.tool_version,
    }


def dataset_report_payload(report: DatasetReport) -> dict[str, Any]:
    return {
        "report_type": "dataset",
        "summary": _summary(report.summary),
        "average_composition": _average_composition(report.average_composition),
        "aggregate_contribution": _aggregate(report.aggregate_contribution),
        "promotion_boxplot": _boxplot(report.promotion_boxplot),
        "per_project": [project_report_payload(p) for p in report.per_project],
        "generated_at": format_timestamp(report.generated_at),
        "tool_version": report.tool_version,
    }


def report_payload(report: DatasetReport | ProjectReport) -> dict[str, Any]:
    if isinstance(report, DatasetReport):
        return dataset_report_payload(report)
    return project_report_payload(report)


def render_json(report: DatasetReport | ProjectReport) -> bytes:
    payload = report_payload(report)
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def emit_json(report: DatasetReport | ProjectReport, destination: str | Path | IO[bytes]) -> int:
    """Write the report as JSON; returns the number of bytes written.

    ``destination`` may be a path, ``"-"`` for standard output, or a
    binary file object.
    """
    data = render_json(report)
    if destination == "-":
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
        return len(data)
    if isinstance(destination, (str, Path)):
        Path(destination).write_bytes(data)
        return len(data)
    destination.write(data)
    return len(data)
