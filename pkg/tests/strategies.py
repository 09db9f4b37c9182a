"""Hypothesis strategies and store-manipulation helpers for the test suite.

Stores are assembled through :class:`StoreBuilder`, so every generated
store already satisfies the canonical invariants (sorted events,
reconciled merge flags); the strategies only have to produce consistent
raw records.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from hypothesis import strategies as st

from openness.model import EventKind, EventStore, StoreBuilder

T0 = datetime(2012, 1, 1, tzinfo=timezone.utc)
MAX_OFFSET = 200 * 86400  # seconds

# Floating events use subject ids far above generated PR ids so a random
# PullRequestMerged event never flips a pull request record.
FLOATING_SUBJECT_BASE = 5000

_FLOATING_KINDS = [
    EventKind.ISSUE_OPENED,
    EventKind.ISSUE_CLOSED,
    EventKind.ISSUE_REOPENED,
    EventKind.ISSUE_COMMENT,
    EventKind.PULL_REQUEST_COMMENT,
    EventKind.PULL_REQUEST_MERGED,
    EventKind.PULL_REQUEST_REOPENED,
    EventKind.MEMBER_ADDED,
    EventKind.COMMIT_AUTHORED,
]


def at(seconds: int) -> datetime:
    return T0 + timedelta(seconds=seconds)


def _add_pull_request(builder, draw, ids, pr_id, project_id, n_users, with_events=True):
    author = draw(st.integers(1, n_users))
    opened = draw(st.integers(0, MAX_OFFSET))
    closed_delta = draw(st.one_of(st.none(), st.integers(0, 50 * 86400)))
    merged = draw(st.booleans()) if closed_delta is not None else False
    intra = draw(st.booleans())
    closed_at = at(opened + closed_delta) if closed_delta is not None else None
    builder.add_pull_request(
        pr_id=pr_id,
        project_id=project_id,
        author_id=author,
        opened_at=at(opened),
        closed_at=closed_at,
        merged=merged,
        head_project=project_id if intra else 100000 + pr_id,
        base_project=project_id,
    )
    if not with_events:
        return
    if draw(st.booleans()):
        builder.add_event(
            event_id=next(ids),
            kind=EventKind.PULL_REQUEST_OPENED,
            actor_id=author,
            project_id=project_id,
            subject_id=pr_id,
            at=at(opened),
        )
    if closed_at is not None and draw(st.booleans()):
        closer = draw(st.integers(1, n_users))
        kind = EventKind.PULL_REQUEST_MERGED if merged else EventKind.PULL_REQUEST_CLOSED
        builder.add_event(
            event_id=next(ids),
            kind=kind,
            actor_id=closer,
            project_id=project_id,
            subject_id=pr_id,
            at=closed_at,
        )


def _add_floating_events(builder, draw, ids, project_id, n_users, max_events):
    n_events = draw(st.integers(0, max_events))
    for i in range(n_events):
        kind = draw(st.sampled_from(_FLOATING_KINDS))
        actor = draw(st.integers(1, n_users))
        offset = draw(st.integers(0, MAX_OFFSET))
        if kind is EventKind.COMMIT_AUTHORED:
            subject = draw(st.one_of(st.none(), st.just(f"sha{project_id}-{i}")))
        else:
            subject = FLOATING_SUBJECT_BASE + draw(st.integers(0, 6))
        builder.add_event(
            event_id=next(ids),
            kind=kind,
            actor_id=actor,
            project_id=project_id,
            subject_id=subject,
            at=at(offset),
        )


def _id_counter():
    value = 0
    while True:
        value += 1
        yield value


@st.composite
def single_project_stores(
    draw,
    min_users: int = 1,
    max_users: int = 5,
    max_events: int = 10,
    max_prs: int = 3,
) -> EventStore:
    """One original project (id 1) with a pool of users, PRs and events."""
    n_users = draw(st.integers(min_users, max_users))
    builder = StoreBuilder()
    for uid in range(1, n_users + 1):
        builder.add_user(uid, f"user{uid}")
    owner = draw(st.integers(1, n_users))
    builder.add_project(1, f"user{owner}/proj", owner, None, T0)
    for uid in range(1, n_users + 1):
        if uid != owner and draw(st.booleans() if uid <= 2 else st.just(False)):
            builder.add_membership(1, uid, draw(st.one_of(st.none(), st.just(at(0)))))
    ids = _id_counter()
    n_prs = draw(st.integers(0, max_prs))
    for pr_id in range(1, n_prs + 1):
        _add_pull_request(builder, draw, ids, pr_id, 1, n_users)
    _add_floating_events(builder, draw, ids, 1, n_users, max_events)
    return builder.build()


@st.composite
def event_stores(
    draw,
    max_projects: int = 3,
    max_users: int = 5,
    max_events: int = 8,
    max_prs: int = 3,
) -> EventStore:
    """Multi-project stores (originals and forks) for round-trip testing."""
    builder = StoreBuilder()
    n_users = draw(st.integers(1, max_users))
    for uid in range(1, n_users + 1):
        builder.add_user(uid, f"user{uid}")
    n_projects = draw(st.integers(1, max_projects))
    for pid in range(1, n_projects + 1):
        owner = draw(st.integers(1, n_users))
        forked_from = None
        if pid > 1 and draw(st.booleans()):
            forked_from = draw(st.integers(1, pid - 1))
        created = draw(st.integers(0, MAX_OFFSET // 2))
        builder.add_project(pid, f"org{pid}/repo{pid}", owner, forked_from, at(created))
    for pid in range(1, n_projects + 1):
        for uid in range(1, min(n_users, 2) + 1):
            if draw(st.booleans()):
                recorded = draw(st.one_of(st.none(), st.integers(0, MAX_OFFSET)))
                builder.add_membership(pid, uid, at(recorded) if recorded is not None else None)
    ids = _id_counter()
    pr_ids = _id_counter()
    for pid in range(1, n_projects + 1):
        n_prs = draw(st.integers(0, max_prs))
        for _ in range(n_prs):
            _add_pull_request(builder, draw, ids, next(pr_ids), pid, n_users)
        _add_floating_events(builder, draw, ids, pid, n_users, max_events)
    return builder.build()


def builder_from_store(store: EventStore) -> StoreBuilder:
    """Reload a store's records into a fresh builder (for extension tests)."""
    builder = StoreBuilder()
    for user in sorted(store.users.values(), key=lambda u: u.user_id):
        builder.add_user(user.user_id, user.login)
    for project in sorted(store.projects.values(), key=lambda p: p.project_id):
        builder.add_project(
            project.project_id,
            project.full_name,
            project.owner.user_id,
            project.forked_from,
            project.created_at,
        )
    for membership in store.memberships:
        builder.add_membership(
            membership.project.project_id, membership.user.user_id, membership.recorded_at
        )
    for pr in store.iter_pull_requests():
        builder.add_pull_request(
            pr.pr_id,
            pr.project.project_id,
            pr.author.user_id,
            pr.opened_at,
            pr.closed_at,
            pr.merged,
            pr.head_project,
            pr.base_project,
        )
    for event in store.iter_events():
        builder.add_event(
            event.event_id,
            event.kind,
            event.actor.user_id,
            event.project.project_id,
            event.subject_id,
            event.at,
        )
    return builder
