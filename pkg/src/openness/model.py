"""Canonical domain model for repository event data.

The :class:`EventStore` is the single in-memory representation every
analysis consumes, regardless of whether the data arrived as an NDJSON
stream, a relational CSV dump, or a live API crawl. Stores are built
through :class:`StoreBuilder` and treated as immutable afterwards, which
makes them safe to share across concurrent per-project analyses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Iterable, Union

from .errors import DuplicateRecord, SchemaError, UnknownReference

SubjectId = Union[int, str]


class EventKind(Enum):
    """The unified vocabulary of actor/action occurrences in a project."""

    ISSUE_OPENED = "IssueOpened"
    ISSUE_CLOSED = "IssueClosed"
    ISSUE_REOPENED = "IssueReopened"
    ISSUE_COMMENT = "IssueComment"
    PULL_REQUEST_OPENED = "PullRequestOpened"
    PULL_REQUEST_CLOSED = "PullRequestClosed"
    PULL_REQUEST_MERGED = "PullRequestMerged"
    PULL_REQUEST_REOPENED = "PullRequestReopened"
    PULL_REQUEST_COMMENT = "PullRequestComment"
    COMMIT_AUTHORED = "CommitAuthored"
    MEMBER_ADDED = "MemberAdded"

    @property
    def requires_subject(self) -> bool:
        """Whether events of this kind must reference a subject.

        Commits are attributed to the project as a whole; every other kind
        acts on a specific issue, pull request, or user.
        """
        return self is not EventKind.COMMIT_AUTHORED


ISSUE_KINDS = frozenset({
    EventKind.ISSUE_OPENED,
    EventKind.ISSUE_CLOSED,
    EventKind.ISSUE_REOPENED,
    EventKind.ISSUE_COMMENT,
})

PULL_REQUEST_EVENT_KINDS = frozenset({
    EventKind.PULL_REQUEST_OPENED,
    EventKind.PULL_REQUEST_CLOSED,
    EventKind.PULL_REQUEST_MERGED,
    EventKind.PULL_REQUEST_REOPENED,
    EventKind.PULL_REQUEST_COMMENT,
})


@dataclass(frozen=True)
class UserRef:
    """A user account. ``user_id`` and ``login`` are both unique store-wide."""

    user_id: int
    login: str


@dataclass(frozen=True)
class ProjectRef:
    """A repository. A project is *original* iff it is not a fork."""

    project_id: int
    full_name: str
    owner: UserRef
    forked_from: int | None
    created_at: datetime

    @property
    def is_original(self) -> bool:
        return self.forked_from is None


@dataclass(frozen=True)
class EventRecord:
    """One actor/action/timestamp occurrence within a project."""

    event_id: int
    kind: EventKind
    actor: UserRef
    project: ProjectRef
    subject_id: SubjectId | None
    at: datetime


@dataclass(frozen=True)
class PullRequestRecord:
    """A pull request's lifecycle against its target (base) project.

    ``head_project`` / ``base_project`` are repository identifiers; the
    head may live outside the store (a contributor's fork).
    """

    pr_id: int
    project: ProjectRef
    author: UserRef
    opened_at: datetime
    closed_at: datetime | None
    merged: bool
    head_project: int
    base_project: int

    @property
    def is_intra_branch(self) -> bool:
        """True when head and base are the same repository.

        Opening such a pull request requires write access to the project.
        """
        return self.head_project == self.base_project


@dataclass(frozen=True)
class MembershipRecord:
    """A user officially listed on a project. ``recorded_at`` is often absent."""

    project: ProjectRef
    user: UserRef
    recorded_at: datetime | None


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal ingest finding. Nothing is ever dropped silently."""

    kind: str
    message: str
    line_number: int | None = None
    payload: str | None = None


# Diagnostic kinds emitted by the loaders and the builder.
DIAG_MALFORMED_LINE = "malformed-line"
DIAG_SCHEMA_VIOLATION = "schema-violation"
DIAG_DANGLING_REFERENCE = "dangling-reference"
DIAG_DUPLICATE_RECORD = "duplicate-record"
DIAG_EVENT_BEFORE_CREATION = "event-before-project-creation"
DIAG_INVALID_LIFECYCLE = "invalid-lifecycle"
DIAG_COMMIT_AUTHOR_LINKAGE = "commit-author-linkage"
DIAG_JOIN_ERROR = "join-error"


@dataclass(frozen=True)
class DatasetSummary:
    """Headline counts over a store."""

    project_count: int
    original_project_count: int
    user_count: int
    issue_count: int
    pr_count: int
    commit_count: int


def _event_sort_key(event: EventRecord) -> tuple[datetime, int]:
    return (event.at, event.event_id)


def _pr_sort_key(pr: PullRequestRecord) -> tuple[datetime, int]:
    return (pr.opened_at, pr.pr_id)


@dataclass
class EventStore:
    """Canonical container for one dataset.

    ``events`` and ``pull_requests`` are keyed by project id; every project
    in ``projects`` has an entry (possibly empty). Event lists are sorted
    ascending by ``(at, event_id)``. Diagnostics do not take part in
    equality: two stores holding the same data compare equal even if they
    were ingested along different paths.
    """

    users: dict[int, UserRef]
    projects: dict[int, ProjectRef]
    events: dict[int, tuple[EventRecord, ...]]
    pull_requests: dict[int, tuple[PullRequestRecord, ...]]
    memberships: tuple[MembershipRecord, ...]
    diagnostics: list[Diagnostic] = field(compare=False, default_factory=list)

    _users_by_login: dict[str, UserRef] = field(compare=False, repr=False, default_factory=dict)
    _projects_by_name: dict[str, ProjectRef] = field(compare=False, repr=False, default_factory=dict)
    _prs_by_id: dict[tuple[int, SubjectId], PullRequestRecord] = field(
        compare=False, repr=False, default_factory=dict
    )
    _issue_creators: dict[tuple[int, SubjectId], UserRef] = field(
        compare=False, repr=False, default_factory=dict
    )
    _pr_openers: dict[tuple[int, SubjectId], UserRef] = field(
        compare=False, repr=False, default_factory=dict
    )
    _members: dict[int, frozenset[int]] = field(compare=False, repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        self._users_by_login = {u.login: u for u in self.users.values()}
        self._projects_by_name = {p.full_name: p for p in self.projects.values()}
        for prs in self.pull_requests.values():
            for pr in prs:
                self._prs_by_id[(pr.project.project_id, pr.pr_id)] = pr
        for events in self.events.values():
            for event in events:
                key = (event.project.project_id, event.subject_id)
                if event.kind is EventKind.ISSUE_OPENED:
                    self._issue_creators.setdefault(key, event.actor)
                elif event.kind is EventKind.PULL_REQUEST_OPENED:
                    self._pr_openers.setdefault(key, event.actor)
        members: dict[int, set[int]] = {pid: set() for pid in self.projects}
        for membership in self.memberships:
            members[membership.project.project_id].add(membership.user.user_id)
        for project in self.projects.values():
            members[project.project_id].add(project.owner.user_id)
        self._members = {pid: frozenset(ids) for pid, ids in members.items()}

    # -- lookups -----------------------------------------------------------

    def user_by_login(self, login: str) -> UserRef | None:
        return self._users_by_login.get(login)

    def project_by_name(self, full_name: str) -> ProjectRef | None:
        return self._projects_by_name.get(full_name)

    def project_events(self, project_id: int) -> tuple[EventRecord, ...]:
        return self.events.get(project_id, ())

    def project_pull_requests(self, project_id: int) -> tuple[PullRequestRecord, ...]:
        return self.pull_requests.get(project_id, ())

    def pull_request(self, project_id: int, pr_id: SubjectId) -> PullRequestRecord | None:
        return self._prs_by_id.get((project_id, pr_id))

    def issue_creator(self, project_id: int, subject_id: SubjectId | None) -> UserRef | None:
        """The user who opened the issue, if its opening event is in the store."""
        return self._issue_creators.get((project_id, subject_id))

    def pr_author(self, project_id: int, subject_id: SubjectId | None) -> UserRef | None:
        """The pull request author, from its record or its opening event."""
        pr = self._prs_by_id.get((project_id, subject_id))
        if pr is not None:
            return pr.author
        return self._pr_openers.get((project_id, subject_id))

    def members_of(self, project_id: int) -> frozenset[int]:
        """User ids of the project's official members, owner included."""
        return self._members.get(project_id, frozenset())

    def original_projects(self) -> list[ProjectRef]:
        return sorted(
            (p for p in self.projects.values() if p.is_original),
            key=lambda p: p.project_id,
        )

    def iter_events(self) -> Iterable[EventRecord]:
        for pid in sorted(self.events):
            yield from self.events[pid]

    def iter_pull_requests(self) -> Iterable[PullRequestRecord]:
        for pid in sorted(self.pull_requests):
            yield from self.pull_requests[pid]

    def summary(self) -> DatasetSummary:
        issue_count = 0
        commit_count = 0
        for event in self.iter_events():
            if event.kind is EventKind.ISSUE_OPENED:
                issue_count += 1
            elif event.kind is EventKind.COMMIT_AUTHORED:
                commit_count += 1
        return DatasetSummary(
            project_count=len(self.projects),
            original_project_count=sum(1 for p in self.projects.values() if p.is_original),
            user_count=len(self.users),
            issue_count=issue_count,
            pr_count=sum(len(prs) for prs in self.pull_requests.values()),
            commit_count=commit_count,
        )


class StoreBuilder:
    """Accumulates validated records and produces a canonical EventStore.

    ``add_*`` methods raise :class:`UnknownReference`, :class:`DuplicateRecord`
    or :class:`SchemaError` on bad records; loaders decide whether those
    abort the run (strict mode) or become diagnostics (lenient mode).
    ``build`` sorts, reconciles merge flags against merge events, flags
    events that predate their project, and indexes the result.
    """

    def __init__(self) -> None:
        self._users: dict[int, UserRef] = {}
        self._logins: dict[str, int] = {}
        self._projects: dict[int, ProjectRef] = {}
        self._project_names: dict[str, int] = {}
        self._events: dict[int, list[EventRecord]] = {}
        self._event_ids: dict[int, set[int]] = {}
        self._pull_requests: dict[int, dict[int, PullRequestRecord]] = {}
        self._memberships: dict[tuple[int, int], MembershipRecord] = {}
        self.diagnostics: list[Diagnostic] = []

    @property
    def users(self) -> dict[int, UserRef]:
        """Users registered so far (loaders use this to resolve joins)."""
        return self._users

    # -- entities ----------------------------------------------------------

    def add_user(self, user_id: int, login: str) -> UserRef:
        if not login:
            raise SchemaError("login must be non-empty", field="login")
        existing = self._users.get(user_id)
        if existing is not None:
            if existing.login == login:
                return existing
            raise DuplicateRecord(f"user id {user_id} already registered as {existing.login!r}")
        if login in self._logins:
            raise DuplicateRecord(f"login {login!r} already registered with id {self._logins[login]}")
        user = UserRef(user_id=user_id, login=login)
        self._users[user_id] = user
        self._logins[login] = user_id
        return user

    def add_project(
        self,
        project_id: int,
        full_name: str,
        owner_id: int,
        forked_from: int | None,
        created_at: datetime,
    ) -> ProjectRef:
        if not full_name:
            raise SchemaError("full_name must be non-empty", field="full_name")
        owner = self._users.get(owner_id)
        if owner is None:
            raise UnknownReference(f"project {full_name!r} references unknown owner {owner_id}")
        if project_id in self._projects:
            raise DuplicateRecord(f"project id {project_id} already registered")
        if full_name in self._project_names:
            raise DuplicateRecord(f"project {full_name!r} already registered")
        project = ProjectRef(
            project_id=project_id,
            full_name=full_name,
            owner=owner,
            forked_from=forked_from,
            created_at=created_at,
        )
        self._projects[project_id] = project
        self._project_names[full_name] = project_id
        self._events.setdefault(project_id, [])
        self._event_ids.setdefault(project_id, set())
        self._pull_requests.setdefault(project_id, {})
        return project

    def add_membership(self, project_id: int, user_id: int, recorded_at: datetime | None) -> MembershipRecord:
        project = self._projects.get(project_id)
        if project is None:
            raise UnknownReference(f"membership references unknown project {project_id}")
        user = self._users.get(user_id)
        if user is None:
            raise UnknownReference(f"membership references unknown user {user_id}")
        key = (project_id, user_id)
        if key in self._memberships:
            raise DuplicateRecord(f"membership ({project.full_name}, {user.login}) already registered")
        record = MembershipRecord(project=project, user=user, recorded_at=recorded_at)
        self._memberships[key] = record
        return record

    def add_pull_request(
        self,
        pr_id: int,
        project_id: int,
        author_id: int,
        opened_at: datetime,
        closed_at: datetime | None,
        merged: bool,
        head_project: int,
        base_project: int,
    ) -> PullRequestRecord:
        project = self._projects.get(project_id)
        if project is None:
            raise UnknownReference(f"pull request {pr_id} references unknown project {project_id}")
        author = self._users.get(author_id)
        if author is None:
            raise UnknownReference(f"pull request {pr_id} references unknown author {author_id}")
        if pr_id in self._pull_requests[project_id]:
            raise DuplicateRecord(f"pull request {pr_id} already registered for project {project_id}")
        if closed_at is not None and closed_at < opened_at:
            raise SchemaError(
                f"pull request {pr_id} closed before it was opened", field="closed_at"
            )
        record = PullRequestRecord(
            pr_id=pr_id,
            project=project,
            author=author,
            opened_at=opened_at,
            closed_at=closed_at,
            merged=merged,
            head_project=head_project,
            base_project=base_project,
        )
        self._pull_requests[project_id][pr_id] = record
        return record

    def add_event(
        self,
        event_id: int,
        kind: EventKind,
        actor_id: int,
        project_id: int,
        subject_id: SubjectId | None,
        at: datetime,
    ) -> EventRecord:
        project = self._projects.get(project_id)
        if project is None:
            raise UnknownReference(f"event {event_id} references unknown project {project_id}")
        actor = self._users.get(actor_id)
        if actor is None:
            raise UnknownReference(f"event {event_id} references unknown actor {actor_id}")
        if kind.requires_subject and subject_id is None:
            raise SchemaError(f"event kind {kind.value} requires a subject", field="subject_id")
        if event_id in self._event_ids[project_id]:
            raise DuplicateRecord(f"event id {event_id} already registered for project {project_id}")
        event = EventRecord(
            event_id=event_id,
            kind=kind,
            actor=actor,
            project=project,
            subject_id=subject_id,
            at=at,
        )
        self._events[project_id].append(event)
        self._event_ids[project_id].add(event_id)
        return event

    def diagnostic(
        self,
        kind: str,
        message: str,
        *,
        line_number: int | None = None,
        payload: str | None = None,
    ) -> None:
        self.diagnostics.append(
            Diagnostic(kind=kind, message=message, line_number=line_number, payload=payload)
        )

    @property
    def record_count(self) -> int:
        return (
            len(self._users)
            + len(self._projects)
            + len(self._memberships)
            + sum(len(prs) for prs in self._pull_requests.values())
            + sum(len(evs) for evs in self._events.values())
        )

    def build(self) -> EventStore:
        build_diagnostics = list(self.diagnostics)

        def note(kind: str, message: str) -> None:
            build_diagnostics.append(Diagnostic(kind=kind, message=message))

        # Merge detection: a merge event marks the record merged even when
        # the source row did not; the last close event backfills a missing
        # closed_at so decision times stay computable.
        merged_at: dict[tuple[int, SubjectId], datetime] = {}
        closed_at: dict[tuple[int, SubjectId], datetime] = {}
        for project_id, events in self._events.items():
            for event in events:
                key = (project_id, event.subject_id)
                if event.kind is EventKind.PULL_REQUEST_MERGED:
                    prev = merged_at.get(key)
                    if prev is None or event.at > prev:
                        merged_at[key] = event.at
                elif event.kind is EventKind.PULL_REQUEST_CLOSED:
                    prev = closed_at.get(key)
                    if prev is None or event.at > prev:
                        closed_at[key] = event.at

        pull_requests: dict[int, tuple[PullRequestRecord, ...]] = {}
        for project_id, prs in self._pull_requests.items():
            reconciled = []
            for pr in prs.values():
                key = (project_id, pr.pr_id)
                merged = pr.merged or key in merged_at
                close = pr.closed_at
                if close is None:
                    candidates = [t for t in (closed_at.get(key), merged_at.get(key)) if t is not None]
                    if candidates:
                        close = max(candidates)
                if (merged != pr.merged) or (close != pr.closed_at):
                    if close is not None and close < pr.opened_at:
                        note(
                            DIAG_INVALID_LIFECYCLE,
                            f"pull request {pr.pr_id} has close events before its opening; record kept as-is",
                        )
                        close = pr.closed_at
                    pr = PullRequestRecord(
                        pr_id=pr.pr_id,
                        project=pr.project,
                        author=pr.author,
                        opened_at=pr.opened_at,
                        closed_at=close,
                        merged=merged,
                        head_project=pr.head_project,
                        base_project=pr.base_project,
                    )
                if pr.merged and pr.closed_at is None:
                    note(
                        DIAG_INVALID_LIFECYCLE,
                        f"pull request {pr.pr_id} is marked merged but has no closing timestamp",
                    )
                reconciled.append(pr)
            pull_requests[project_id] = tuple(sorted(reconciled, key=_pr_sort_key))

        events: dict[int, tuple[EventRecord, ...]] = {}
        for project_id, project_events in self._events.items():
            ordered = tuple(sorted(project_events, key=_event_sort_key))
            events[project_id] = ordered
            project = self._projects[project_id]
            for event in ordered:
                if event.at < project.created_at:
                    note(
                        DIAG_EVENT_BEFORE_CREATION,
                        f"event {event.event_id} predates creation of {project.full_name}; kept",
                    )

        memberships = tuple(
            sorted(
                self._memberships.values(),
                key=lambda m: (m.project.project_id, m.user.user_id),
            )
        )
        return EventStore(
            users=dict(self._users),
            projects=dict(self._projects),
            events=events,
            pull_requests=pull_requests,
            memberships=memberships,
            diagnostics=build_diagnostics,
        )
