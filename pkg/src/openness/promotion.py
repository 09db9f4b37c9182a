"""Time to become collaborator.

The dataset records neither an explicit collaborator list nor a grant
timestamp, so the duration is measured between two observable instants:
a user's first recorded action in the project and their first management
action there. Collaborators whose very first visible act was already
managerial cannot be identified first as external users and are filtered
out (strictly: a tie between the two instants filters too).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Sequence

from .errors import EmptyInput, NotACollaborator, UnresolvedSubject
from .model import EventStore, ProjectRef, UserRef
from .roles import Role, RoleAssignment, classify_users, is_management_action
from .stats import BoxplotSummary, boxplot_summary
from .timeutil import days_between


@dataclass(frozen=True)
class PromotionRecord:
    """One collaborator's path from first action to first management action."""

    user: UserRef
    project: ProjectRef
    first_action_at: datetime
    first_management_at: datetime
    duration_days: float


@dataclass(frozen=True)
class PromotionStats:
    """Per-project promotion records and their mean duration."""

    project: ProjectRef
    records: tuple[PromotionRecord, ...]
    mean_duration_days: float | None


def first_action(user: UserRef, project: ProjectRef, store: EventStore) -> datetime | None:
    """Timestamp of the user's earliest event in the project, if any."""
    times = [
        event.at
        for event in store.project_events(project.project_id)
        if event.actor.user_id == user.user_id
    ]
    return min(times) if times else None


def promotion_record(
    user: UserRef,
    project: ProjectRef,
    store: EventStore,
    *,
    strict_management: bool = False,
    assignments: Sequence[RoleAssignment] | None = None,
) -> PromotionRecord | None:
    """Promotion record for one collaborator, or None when filtered.

    Raises :class:`NotACollaborator` when the user is not classified as a
    collaborator of the project. Returns None when the first management
    action does not strictly follow the first recorded action.
    """
    if assignments is None:
        assignments = classify_users(project, store, strict_management=strict_management)
    role = next((a.role for a in assignments if a.user.user_id == user.user_id), None)
    if role is not Role.COLLABORATOR:
        raise NotACollaborator(f"{user.login} is not a collaborator of {project.full_name}")

    management_times = []
    for event in store.project_events(project.project_id):
        if event.actor.user_id != user.user_id:
            continue
        try:
            if is_management_action(event, store, strict_management=strict_management):
                management_times.append(event.at)
        except UnresolvedSubject:
            continue
    first_management_at = min(management_times)  # collaborator implies >= 1
    first_action_at = first_action(user, project, store)
    if first_action_at is None or first_management_at <= first_action_at:
        return None
    return PromotionRecord(
        user=user,
        project=project,
        first_action_at=first_action_at,
        first_management_at=first_management_at,
        duration_days=days_between(first_action_at, first_management_at),
    )


def project_promotion_stats(
    project: ProjectRef,
    store: EventStore,
    *,
    strict_management: bool = False,
    assignments: Sequence[RoleAssignment] | None = None,
) -> PromotionStats:
    """Promotion records over all of an original project's collaborators."""
    if assignments is None:
        assignments = classify_users(project, store, strict_management=strict_management)
    records = []
    for assignment in assignments:
        if assignment.role is not Role.COLLABORATOR:
            continue
        record = promotion_record(
            assignment.user,
            project,
            store,
            strict_management=strict_management,
            assignments=assignments,
        )
        if record is not None:
            records.append(record)
    durations = [r.duration_days for r in records]
    return PromotionStats(
        project=project,
        records=tuple(records),
        mean_duration_days=(math.fsum(durations) / len(durations)) if durations else None,
    )


def dataset_promotion_distribution(stats: Sequence[PromotionStats]) -> BoxplotSummary:
    """Boxplot over per-project mean durations, labeled by project name.

    Projects where no collaborator has a usable promotion record are
    excluded; raises :class:`EmptyInput` when none remain.
    """
    labeled = [
        (s.project.full_name, s.mean_duration_days)
        for s in stats
        if s.mean_duration_days is not None
    ]
    if not labeled:
        raise EmptyInput("no project has a promotion record")
    return boxplot_summary(labeled)
