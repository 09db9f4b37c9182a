"""External contribution analysis: acceptance rate and decision latency.

Only pull requests authored by external contributors count; members and
collaborators can open pull requests too, but those internal ones are
filtered out. Pending pull requests are tallied but excluded from the
acceptance rate and the decision time.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import EmptyInput, InvalidLifecycle, NotOriginalProject
from .model import EventStore, ProjectRef, PullRequestRecord
from .roles import Role, RoleAssignment, classify_users
from .timeutil import days_between

logger = logging.getLogger(__name__)


class Outcome(Enum):
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"
    PENDING = "Pending"


@dataclass(frozen=True)
class PullRequestOutcome:
    """A pull request's final state and, when decided, its decision time."""

    pr: PullRequestRecord
    outcome: Outcome
    decision_days: float | None


@dataclass(frozen=True)
class ContributionStats:
    """Per-project aggregate over external pull requests."""

    project: ProjectRef
    total_external_prs: int
    accepted: int
    rejected: int
    pending_excluded: int
    acceptance_rate: float | None
    mean_decision_days: float | None


@dataclass(frozen=True)
class ContributionAggregate:
    """Dataset-wide averages; ``pooled`` weights by pull request, not project."""

    mean_acceptance_rate: float
    mean_decision_days: float | None
    projects_included: int
    projects_skipped: int
    pooled: bool


def classify_outcome(pr: PullRequestRecord) -> PullRequestOutcome:
    """Accepted when merged, rejected when closed unmerged, pending otherwise.

    Decision time runs from the opening to the (final) closing event, in
    fractional days. Raises :class:`InvalidLifecycle` for inconsistent
    records (closed before opened, or merged with no closing timestamp).
    """
    if pr.closed_at is None:
        if pr.merged:
            raise InvalidLifecycle(f"pull request {pr.pr_id} is merged but has no closing timestamp")
        return PullRequestOutcome(pr=pr, outcome=Outcome.PENDING, decision_days=None)
    if pr.closed_at < pr.opened_at:
        raise InvalidLifecycle(f"pull request {pr.pr_id} closed before it was opened")
    days = days_between(pr.opened_at, pr.closed_at)
    outcome = Outcome.ACCEPTED if pr.merged else Outcome.REJECTED
    return PullRequestOutcome(pr=pr, outcome=outcome, decision_days=days)


def external_pull_requests(
    project: ProjectRef,
    store: EventStore,
    *,
    strict_management: bool = False,
    role_at_pr_time: bool = False,
    assignments: Sequence[RoleAssignment] | None = None,
) -> list[PullRequestRecord]:
    """Pull requests targeting the project whose author is an external contributor.

    Whole-history classification by default: a user who ever became
    member or collaborator is never an external contributor here. With
    ``role_at_pr_time`` the author's role is evaluated as of each pull
    request's opening instant instead. Intra-branch pull requests are
    excluded either way.
    """
    if not project.is_original:
        raise NotOriginalProject(f"{project.full_name} is a fork")
    prs = store.project_pull_requests(project.project_id)

    if role_at_pr_time:
        role_cache: dict[object, dict[int, Role]] = {}
        selected = []
        for pr in prs:
            if pr.is_intra_branch:
                continue
            when = pr.opened_at
            if when not in role_cache:
                snapshot = classify_users(
                    project, store, strict_management=strict_management, as_of=when
                )
                role_cache[when] = {a.user.user_id: a.role for a in snapshot}
            if role_cache[when].get(pr.author.user_id) is Role.EXTERNAL_CONTRIBUTOR:
                selected.append(pr)
        return selected

    if assignments is None:
        assignments = classify_users(project, store, strict_management=strict_management)
    roles_by_user = {a.user.user_id: a.role for a in assignments}
    return [
        pr
        for pr in prs
        if not pr.is_intra_branch and roles_by_user.get(pr.author.user_id) is Role.EXTERNAL_CONTRIBUTOR
    ]


def contribution_stats(
    project: ProjectRef,
    store: EventStore,
    *,
    strict_management: bool = False,
    role_at_pr_time: bool = False,
    assignments: Sequence[RoleAssignment] | None = None,
) -> ContributionStats:
    """Acceptance and latency aggregate over a project's external pull requests."""
    accepted = 0
    rejected = 0
    pending = 0
    decision_days: list[float] = []
    prs = external_pull_requests(
        project,
        store,
        strict_management=strict_management,
        role_at_pr_time=role_at_pr_time,
        assignments=assignments,
    )
    for pr in prs:
        try:
            result = classify_outcome(pr)
        except InvalidLifecycle as exc:
            logger.warning("%s: %s; excluded from stats", project.full_name, exc)
            continue
        if result.outcome is Outcome.ACCEPTED:
            accepted += 1
            decision_days.append(result.decision_days)
        elif result.outcome is Outcome.REJECTED:
            rejected += 1
            decision_days.append(result.decision_days)
        else:
            pending += 1
    decided = accepted + rejected
    return ContributionStats(
        project=project,
        total_external_prs=accepted + rejected + pending,
        accepted=accepted,
        rejected=rejected,
        pending_excluded=pending,
        acceptance_rate=(accepted / decided) if decided else None,
        mean_decision_days=(math.fsum(decision_days) / decided) if decided else None,
    )


def aggregate_contribution(
    stats: Sequence[ContributionStats],
    *,
    pooled: bool = False,
) -> ContributionAggregate:
    """Dataset-wide acceptance rate and decision time.

    The default is the unweighted mean over projects (each project counts
    once); ``pooled`` averages over the pull requests themselves. Projects
    without a decided external pull request are skipped and counted.
    Raises :class:`EmptyInput` when no project had a decided external PR.
    """
    included = [s for s in stats if s.acceptance_rate is not None]
    skipped = len(stats) - len(included)
    if not included:
        raise EmptyInput("no project has a decided external pull request")
    if pooled:
        total_accepted = sum(s.accepted for s in included)
        total_decided = sum(s.accepted + s.rejected for s in included)
        total_days = math.fsum(s.mean_decision_days * (s.accepted + s.rejected) for s in included)
        return ContributionAggregate(
            mean_acceptance_rate=total_accepted / total_decided,
            mean_decision_days=total_days / total_decided,
            projects_included=len(included),
            projects_skipped=skipped,
            pooled=True,
        )
    n = len(included)
    return ContributionAggregate(
        mean_acceptance_rate=math.fsum(s.acceptance_rate for s in included) / n,
        mean_decision_days=math.fsum(s.mean_decision_days for s in included) / n,
        projects_included=n,
        projects_skipped=skipped,
        pooled=False,
    )
