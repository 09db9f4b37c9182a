"""Assemble per-project and dataset-wide reports from a store.

``generated_at`` is the store's data watermark (the latest record
timestamp), not the wall clock, so a given input always produces
byte-identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from .. import __version__
from ..contrib import ContributionAggregate, ContributionStats, aggregate_contribution, contribution_stats
from ..errors import EmptyInput, NotOriginalProject
from ..model import DatasetSummary, EventStore, ProjectRef
from ..promotion import PromotionStats, dataset_promotion_distribution, project_promotion_stats
from ..roles import (
    AverageComposition,
    CommunityComposition,
    average_composition,
    classify_users,
    compose_community,
)
from ..stats import BoxplotSummary

ALL_METRICS = frozenset({"m1", "m2", "m3"})

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class ProjectReport:
    """All metric results for one original project."""

    project: ProjectRef
    composition: CommunityComposition | None
    contribution: ContributionStats | None
    promotion: PromotionStats | None
    generated_at: datetime
    tool_version: str


@dataclass(frozen=True)
class DatasetReport:
    """Dataset inventory, aggregates, and one report per original project."""

    summary: DatasetSummary
    average_composition: AverageComposition | None
    aggregate_contribution: ContributionAggregate | None
    promotion_boxplot: BoxplotSummary | None
    per_project: tuple[ProjectReport, ...]
    generated_at: datetime
    tool_version: str


def data_watermark(store: EventStore) -> datetime:
    """Latest timestamp present in the store (epoch when the store is bare)."""
    latest = _EPOCH
    for project in store.projects.values():
        latest = max(latest, project.created_at)
    for event in store.iter_events():
        latest = max(latest, event.at)
    for pr in store.iter_pull_requests():
        latest = max(latest, pr.closed_at or pr.opened_at)
    for membership in store.memberships:
        if membership.recorded_at is not None:
            latest = max(latest, membership.recorded_at)
    return latest


def build_project_report(
    project: ProjectRef,
    store: EventStore,
    *,
    metrics: frozenset[str] = ALL_METRICS,
    strict_management: bool = False,
    role_at_pr_time: bool = False,
    generated_at: datetime | None = None,
) -> ProjectReport:
    """Compute the selected metrics for one original project."""
    if not project.is_original:
        raise NotOriginalProject(f"{project.full_name} is a fork")
    assignments = classify_users(project, store, strict_management=strict_management)
    composition = None
    contribution = None
    promotion = None
    if "m1" in metrics:
        composition = compose_community(project, store, assignments=assignments)
    if "m2" in metrics:
        contribution = contribution_stats(
            project,
            store,
            strict_management=strict_management,
            role_at_pr_time=role_at_pr_time,
            assignments=None if role_at_pr_time else assignments,
        )
    if "m3" in metrics:
        promotion = project_promotion_stats(
            project, store, strict_management=strict_management, assignments=assignments
        )
    return ProjectReport(
        project=project,
        composition=composition,
        contribution=contribution,
        promotion=promotion,
        generated_at=generated_at if generated_at is not None else data_watermark(store),
        tool_version=__version__,
    )


def build_dataset_report(
    store: EventStore,
    *,
    metrics: frozenset[str] = ALL_METRICS,
    strict_management: bool = False,
    role_at_pr_time: bool = False,
    pooled: bool = False,
) -> DatasetReport:
    """Compute the selected metrics for every original project in the store."""
    generated_at = data_watermark(store)
    per_project = []
    for project in store.original_projects():
        report = build_project_report(
            project,
            store,
            metrics=metrics,
            strict_management=strict_management,
            role_at_pr_time=role_at_pr_time,
            generated_at=generated_at,
        )
        if report.composition is not None and report.composition.total_users == 0:
            continue  # no classified user at all (cannot happen with an owner)
        per_project.append(report)

    average = None
    aggregate = None
    boxplot = None
    if "m1" in metrics and per_project:
        average = average_composition([r.composition for r in per_project])
    if "m2" in metrics and per_project:
        try:
            aggregate = aggregate_contribution(
                [r.contribution for r in per_project], pooled=pooled
            )
        except EmptyInput:
            aggregate = None
    if "m3" in metrics and per_project:
        try:
            boxplot = dataset_promotion_distribution([r.promotion for r in per_project])
        except EmptyInput:
            boxplot = None
    return DatasetReport(
        summary=store.summary(),
        average_composition=average,
        aggregate_contribution=aggregate,
        promotion_boxplot=boxplot,
        per_project=tuple(per_project),
        generated_at=generated_at,
        tool_version=__version__,
    )
