"""Loader for GHTorrent-style relational CSV dumps.

The dump is a directory of CSV tables (header row required):
``projects`` and ``users`` are mandatory; ``project_members``,
``pull_requests``, ``pull_request_history``, ``issues``, ``issue_events``,
``issue_comments`` and ``commits`` are optional and default to empty.
Column layouts are documented in ``docs/formats.md``.

Event records are synthesized from the activity tables with sequential
event ids, assigned in a fixed table order (issues, issue_events,
issue_comments, pull_request_history, commits; rows in file order) so a
dump always loads to the same store.
"""

from __future__ import annotations

import csv
import logging
from datetime import datetime
from pathlib import Path
from typing import Iterator

from ..errors import JoinError, MissingTable, OpennessError, SchemaError
from ..model import (
    DIAG_COMMIT_AUTHOR_LINKAGE,
    DIAG_JOIN_ERROR,
    DIAG_SCHEMA_VIOLATION,
    EventKind,
    EventStore,
    StoreBuilder,
)
from ..timeutil import parse_timestamp

logger = logging.getLogger(__name__)

MANDATORY_TABLES = ("projects", "users")
OPTIONAL_TABLES = (
    "project_members",
    "pull_requests",
    "pull_request_history",
    "issues",
    "issue_events",
    "issue_comments",
    "commits",
)

_PR_ACTION_KINDS = {
    "opened": EventKind.PULL_REQUEST_OPENED,
    "closed": EventKind.PULL_REQUEST_CLOSED,
    "merged": EventKind.PULL_REQUEST_MERGED,
    "reopened": EventKind.PULL_REQUEST_REOPENED,
}

_ISSUE_ACTION_KINDS = {
    "closed": EventKind.ISSUE_CLOSED,
    "reopened": EventKind.ISSUE_REOPENED,
}


class _Row:
    """One CSV row with typed, validated accessors."""

    def __init__(self, table: str, number: int, data: dict[str, str]):
        self.table = table
        self.number = number
        self.data = data

    def describe(self) -> str:
        return f"{self.table} row {self.number}"

    def _raw(self, column: str) -> str:
        if column not in self.data:
            raise SchemaError(f"{self.describe()}: missing column", field=column)
        return (self.data[column] or "").strip()

    def int_(self, column: str) -> int:
        text = self._raw(column)
        try:
            return int(text)
        except ValueError as exc:
            raise SchemaError(f"{self.describe()}: not an integer: {text!r}", field=column) from exc

    def opt_int(self, column: str) -> int | None:
        text = (self.data.get(column) or "").strip()
        if not text:
            return None
        try:
            return int(text)
        except ValueError as exc:
            raise SchemaError(f"{self.describe()}: not an integer: {text!r}", field=column) from exc

    def str_(self, column: str) -> str:
        text = self._raw(column)
        if not text:
            raise SchemaError(f"{self.describe()}: empty value", field=column)
        return text

    def timestamp(self, column: str) -> datetime:
        text = self.str_(column)
        try:
            return parse_timestamp(text)
        except ValueError as exc:
            raise SchemaError(f"{self.describe()}: bad timestamp: {text!r}", field=column) from exc

    def opt_timestamp(self, column: str) -> datetime | None:
        text = (self.data.get(column) or "").strip()
        if not text:
            return None
        try:
            return parse_timestamp(text)
        except ValueError as exc:
            raise SchemaError(f"{self.describe()}: bad timestamp: {text!r}", field=column) from exc

    def bool_(self, column: str, default: bool = False) -> bool:
        text = (self.data.get(column) or "").strip().lower()
        if not text:
            return default
        if text in ("1", "true", "t", "yes"):
            return True
        if text in ("0", "false", "f", "no"):
            return False
        raise SchemaError(f"{self.describe()}: not a boolean: {text!r}", field=column)


def _table_path(directory: Path, name: str) -> Path | None:
    for candidate in (directory / f"{name}.csv", directory / name):
        if candidate.is_file():
            return candidate
    return None


def _rows(directory: Path, name: str) -> Iterator[_Row]:
    path = _table_path(directory, name)
    if path is None:
        return
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        for number, data in enumerate(reader, start=2):  # header is line 1
            yield _Row(name, number, data)


def load_ghtorrent_dump(directory: str | Path, *, strict: bool = False) -> EventStore:
    """Join the dump tables into a canonical EventStore.

    Raises :class:`MissingTable` when ``projects`` or ``users`` is absent.
    Unresolvable foreign keys raise :class:`JoinError` in strict mode and
    become diagnostics otherwise.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(str(directory))
    for name in MANDATORY_TABLES:
        if _table_path(directory, name) is None:
            raise MissingTable(name)

    builder = StoreBuilder()

    def row_error(row: _Row, exc: OpennessError) -> None:
        if strict:
            if isinstance(exc, SchemaError):
                raise exc
            raise JoinError(f"{row.describe()}: {exc}") from exc
        kind = DIAG_SCHEMA_VIOLATION if isinstance(exc, SchemaError) else DIAG_JOIN_ERROR
        builder.diagnostic(kind, f"{row.describe()}: {exc}", payload=str(row.data))

    for row in _rows(directory, "users"):
        try:
            builder.add_user(user_id=row.int_("id"), login=row.str_("login"))
        except OpennessError as exc:
            row_error(row, exc)

    for row in _rows(directory, "projects"):
        try:
            owner_id = row.int_("owner_id")
            owner = builder.users.get(owner_id)
            if owner is None:
                raise JoinError(f"project owner {owner_id} not in users table")
            builder.add_project(
                project_id=row.int_("id"),
                full_name=f"{owner.login}/{row.str_('name')}",
                owner_id=owner_id,
                forked_from=row.opt_int("forked_from"),
                created_at=row.timestamp("created_at"),
            )
        except OpennessError as exc:
            row_error(row, exc)

    for row in _rows(directory, "project_members"):
        try:
            builder.add_membership(
                project_id=row.int_("repo_id"),
                user_id=row.int_("user_id"),
                recorded_at=row.opt_timestamp("created_at"),
            )
        except OpennessError as exc:
            row_error(row, exc)

    # Pull request rows carry repository identity; lifecycle timestamps
    # come from pull_request_history actions.
    pr_rows: dict[int, tuple[_Row, int, int, int, bool]] = {}
    for row in _rows(directory, "pull_requests"):
        try:
            pr_id = row.int_("id")
            pr_rows[pr_id] = (
                row,
                row.int_("base_repo_id"),
                row.int_("head_repo_id"),
                row.int_("user_id"),
                row.bool_("merged", default=False),
            )
        except OpennessError as exc:
            row_error(row, exc)

    history: dict[int, list[tuple[str, int, datetime, _Row]]] = {}
    history_rows: list[_Row] = []
    for row in _rows(directory, "pull_request_history"):
        try:
            action = row.str_("action").lower()
            if action not in _PR_ACTION_KINDS:
                continue  # assignment, review &c. are not part of the vocabulary
            pr_id = row.int_("pull_request_id")
            history.setdefault(pr_id, []).append(
                (action, row.int_("actor_id"), row.timestamp("created_at"), row)
            )
            history_rows.append(row)
        except OpennessError as exc:
            row_error(row, exc)

    for pr_id, (row, base_repo, head_repo, author_id, merged_flag) in pr_rows.items():
        actions = history.get(pr_id, [])
        opened = [t for a, _, t, _ in actions if a == "opened"]
        closed = [t for a, _, t, _ in actions if a == "closed"]
        merged_events = [t for a, _, t, _ in actions if a == "merged"]
        if not opened:
            row_error(row, JoinError(f"pull request {pr_id} has no 'opened' history row"))
            continue
        closed_candidates = closed + merged_events
        try:
            builder.add_pull_request(
                pr_id=pr_id,
                project_id=base_repo,
                author_id=author_id,
                opened_at=min(opened),
                closed_at=max(closed_candidates) if closed_candidates else None,
                merged=merged_flag or bool(merged_events),
                head_project=head_repo,
                base_project=base_repo,
            )
        except OpennessError as exc:
            row_error(row, exc)

    # Activity tables become events, ids assigned sequentially in this
    # fixed order so repeated loads agree byte-for-byte.
    next_event_id = 1
    issue_projects: dict[int, int] = {}

    def add_event(row: _Row, kind: EventKind, actor_id: int, project_id: int, subject_id, at: datetime) -> None:
        nonlocal next_event_id
        try:
            builder.add_event(
                event_id=next_event_id,
                kind=kind,
                actor_id=actor_id,
                project_id=project_id,
                subject_id=subject_id,
                at=at,
            )
            next_event_id += 1
        except OpennessError as exc:
            row_error(row, exc)

    for row in _rows(directory, "issues"):
        try:
            issue_id = row.int_("id")
            project_id = row.int_("repo_id")
            issue_projects[issue_id] = project_id
            add_event(row, EventKind.ISSUE_OPENED, row.int_("reporter_id"), project_id, issue_id, row.timestamp("created_at"))
        except OpennessError as exc:
            row_error(row, exc)

    for row in _rows(directory, "issue_events"):
        try:
            action = row.str_("action").lower()
            kind = _ISSUE_ACTION_KINDS.get(action)
            if kind is None:
                continue
            issue_id = row.int_("issue_id")
            project_id = issue_projects.get(issue_id)
            if project_id is None:
                raise JoinError(f"issue event references unknown issue {issue_id}")
            add_event(row, kind, row.int_("actor_id"), project_id, issue_id, row.timestamp("created_at"))
        except OpennessError as exc:
            row_error(row, exc)

    for row in _rows(directory, "issue_comments"):
        try:
            issue_id = row.int_("issue_id")
            project_id = issue_projects.get(issue_id)
            if project_id is None:
                raise JoinError(f"issue comment references unknown issue {issue_id}")
            add_event(row, EventKind.ISSUE_COMMENT, row.int_("user_id"), project_id, issue_id, row.timestamp("created_at"))
        except OpennessError as exc:
            row_error(row, exc)

    for row in history_rows:
        try:
            action = row.str_("action").lower()
            pr_id = row.int_("pull_request_id")
            if pr_id not in pr_rows:
                raise JoinError(f"history row references unknown pull request {pr_id}")
            project_id = pr_rows[pr_id][1]
            add_event(row, _PR_ACTION_KINDS[action], row.int_("actor_id"), project_id, pr_id, row.timestamp("created_at"))
        except OpennessError as exc:
            row_error(row, exc)

    # Commit authorship may be unlinked (no account for the author email);
    # both counts are surfaced instead of guessing an attribution.
    linked = 0
    unlinked = 0
    for row in _rows(directory, "commits"):
        try:
            author_id = row.opt_int("author_id")
            if author_id is None or author_id not in builder.users:
                unlinked += 1
                continue
            linked += 1
            add_event(
                row,
                EventKind.COMMIT_AUTHORED,
                author_id,
                row.int_("project_id"),
                row.str_("sha"),
                row.timestamp("created_at"),
            )
        except OpennessError as exc:
            row_error(row, exc)
    if linked or unlinked:
        builder.diagnostic(
            DIAG_COMMIT_AUTHOR_LINKAGE,
            f"commit authors: {linked} linked to an account, {unlinked} unlinked (skipped)",
        )

    store = builder.build()
    logger.info(
        "%s: loaded %d projects, %d users (%d diagnostics)",
        directory,
        len(store.projects),
        len(store.users),
        len(store.diagnostics),
    )
    return store
