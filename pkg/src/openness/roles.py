"""Community composition: partition a project's users into four roles.

Every user who touched an original project is assigned exactly one role,
by precedence:

1. ``Member`` — listed in the membership table, or the project owner.
2. ``Collaborator`` — a non-member who performed a management action
   (merging or closing someone else's pull request, closing or reopening
   someone else's issue, reopening anything, or opening an intra-branch
   pull request, which requires write access).
3. ``ExternalContributor`` — a non-member, non-collaborator who authored
   at least one pull request targeting the project.
4. ``ExternalUser`` — anyone else with recorded activity.

Closing one's *own* issue or pull request is not a management action by
default (any author can do that without elevated permission); pass
``strict_management=True`` to count it anyway.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Sequence

from .errors import EmptyInput, NotOriginalProject, UnresolvedSubject
from .model import EventKind, EventRecord, EventStore, ProjectRef, UserRef

logger = logging.getLogger(__name__)


class Role(Enum):
    MEMBER = "Member"
    COLLABORATOR = "Collaborator"
    EXTERNAL_CONTRIBUTOR = "ExternalContributor"
    EXTERNAL_USER = "ExternalUser"


ROLE_ORDER = (Role.MEMBER, Role.COLLABORATOR, Role.EXTERNAL_CONTRIBUTOR, Role.EXTERNAL_USER)


class AssignedReason(Enum):
    MEMBERSHIP_TABLE = "MembershipTable"
    OWNER_OF_PROJECT = "OwnerOfProject"
    MANAGEMENT_ACTION = "ManagementAction"
    SENT_PULL_REQUEST = "SentPullRequest"
    OTHER_ACTIVITY = "OtherActivity"


@dataclass(frozen=True)
class RoleAssignment:
    """One user's role in one project, with the event ids that justify it."""

    user: UserRef
    project: ProjectRef
    role: Role
    evidence: tuple[int, ...]
    assigned_reason: AssignedReason


@dataclass(frozen=True)
class CommunityComposition:
    """Role histogram of a project's community."""

    project: ProjectRef
    counts: dict[Role, int]
    percentages: dict[Role, float]

    @property
    def total_users(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class AverageComposition:
    """Unweighted mean of per-project composition percentages."""

    percentages: dict[Role, float]
    project_count: int


_ALWAYS_MANAGEMENT = frozenset({
    EventKind.PULL_REQUEST_MERGED,
    EventKind.ISSUE_REOPENED,
    EventKind.PULL_REQUEST_REOPENED,
})

_CLOSE_KINDS = frozenset({EventKind.PULL_REQUEST_CLOSED, EventKind.ISSUE_CLOSED})


def is_management_action(
    event: EventRecord,
    store: EventStore,
    *,
    strict_management: bool = False,
) -> bool:
    """Whether an event required elevated repository permission.

    Raises :class:`UnresolvedSubject` when the decision depends on a
    subject (the closed item's creator, the opened pull request's
    branches) that the store cannot resolve.
    """
    kind = event.kind
    if kind in _ALWAYS_MANAGEMENT:
        return True
    project_id = event.project.project_id
    if kind in _CLOSE_KINDS:
        if strict_management:
            return True
        if kind is EventKind.ISSUE_CLOSED:
            creator = store.issue_creator(project_id, event.subject_id)
        else:
            creator = store.pr_author(project_id, event.subject_id)
        if creator is None:
            raise UnresolvedSubject(
                f"event {event.event_id}: cannot resolve creator of subject {event.subject_id!r}"
            )
        return creator.user_id != event.actor.user_id
    if kind is EventKind.PULL_REQUEST_OPENED:
        pr = store.pull_request(project_id, event.subject_id)
        if pr is None:
            raise UnresolvedSubject(
                f"event {event.event_id}: no pull request record for subject {event.subject_id!r}"
            )
        return pr.is_intra_branch
    return False


def classify_users(
    project: ProjectRef,
    store: EventStore,
    *,
    strict_management: bool = False,
    as_of: datetime | None = None,
) -> list[RoleAssignment]:
    """Assign a role to every user active in an original project.

    ``as_of`` restricts the evidence to events, memberships and pull
    requests at or before the given instant (used for time-aware role
    evaluation). Users with no events and no membership do not appear.
    Output is sorted by user id and independent of ingestion order.
    """
    if not project.is_original:
        raise NotOriginalProject(f"{project.full_name} is a fork; roles apply to original projects")
    project_id = project.project_id

    events = store.project_events(project_id)
    if as_of is not None:
        events = tuple(e for e in events if e.at <= as_of)

    member_ids = {project.owner.user_id}
    for membership in store.memberships:
        if membership.project.project_id != project_id:
            continue
        if as_of is not None and membership.recorded_at is not None and membership.recorded_at > as_of:
            continue
        member_ids.add(membership.user.user_id)

    actors: dict[int, UserRef] = {}
    activity: dict[int, list[int]] = {}
    management: dict[int, list[int]] = {}
    for event in events:
        uid = event.actor.user_id
        actors[uid] = event.actor
        activity.setdefault(uid, []).append(event.event_id)
        try:
            managed = is_management_action(event, store, strict_management=strict_management)
        except UnresolvedSubject as exc:
            logger.warning("%s: %s; not counted as management", project.full_name, exc)
            managed = False
        if managed:
            management.setdefault(uid, []).append(event.event_id)

    opened_events: dict[int, list[int]] = {}
    for event in events:
        if event.kind is EventKind.PULL_REQUEST_OPENED:
            opened_events.setdefault(event.actor.user_id, []).append(event.event_id)
    authored_prs: dict[int, list[int]] = {}
    for pr in store.project_pull_requests(project_id):
        if as_of is not None and pr.opened_at > as_of:
            continue
        authored_prs.setdefault(pr.author.user_id, []).append(pr.pr_id)

    universe = set(actors) | member_ids
    assignments: list[RoleAssignment] = []
    for uid in sorted(universe):
        user = actors.get(uid) or store.users.get(uid)
        if user is None and uid == project.owner.user_id:
            user = project.owner
        if user is None:
            # Membership rows resolve users at ingest, so this is unreachable
            # in practice; guard anyway.
            logger.warning("%s: user %d has activity but no user record", project.full_name, uid)
            continue
        if uid in member_ids:
            reason = (
                AssignedReason.OWNER_OF_PROJECT
                if uid == project.owner.user_id
                else AssignedReason.MEMBERSHIP_TABLE
            )
            assignments.append(
                RoleAssignment(user=user, project=project, role=Role.MEMBER, evidence=(), assigned_reason=reason)
            )
        elif uid in management:
            assignments.append(
                RoleAssignment(
                    user=user,
                    project=project,
                    role=Role.COLLABORATOR,
                    evidence=tuple(sorted(management[uid])),
                    assigned_reason=AssignedReason.MANAGEMENT_ACTION,
                )
            )
        elif uid in authored_prs:
            evidence = tuple(sorted(opened_events.get(uid, []))) or tuple(sorted(authored_prs[uid]))
            assignments.append(
                RoleAssignment(
                    user=user,
                    project=project,
                    role=Role.EXTERNAL_CONTRIBUTOR,
                    evidence=evidence,
                    assigned_reason=AssignedReason.SENT_PULL_REQUEST,
                )
            )
        else:
            assignments.append(
                RoleAssignment(
                    user=user,
                    project=project,
                    role=Role.EXTERNAL_USER,
                    evidence=tuple(sorted(activity[uid])),
                    assigned_reason=AssignedReason.OTHER_ACTIVITY,
                )
            )
    return assignments


def compose_community(
    project: ProjectRef,
    store: EventStore,
    *,
    strict_management: bool = False,
    assignments: Sequence[RoleAssignment] | None = None,
) -> CommunityComposition:
    """Role counts and percentages for one original project."""
    if assignments is None:
        assignments = classify_users(project, store, strict_management=strict_management)
    counts = {role: 0 for role in ROLE_ORDER}
    for assignment in assignments:
        counts[assignment.role] += 1
    total = sum(counts.values())
    percentages = {role: (counts[role] / total if total else 0.0) for role in ROLE_ORDER}
    return CommunityComposition(project=project, counts=counts, percentages=percentages)


def average_composition(compositions: Sequence[CommunityComposition]) -> AverageComposition:
    """Unweighted arithmetic mean of per-project percentage vectors."""
    if not compositions:
        raise EmptyInput("no compositions to average")
    n = len(compositions)
    percentages = {
        role: sum(c.percentages[role] for c in compositions) / n for role in ROLE_ORDER
    }
    return AverageComposition(percentages=percentages, project_count=n)
