"""NDJSON ingestion and serialization.

One JSON object per line, discriminated by a ``type`` field:
``user``, ``project``, ``membership``, ``pull_request``, ``event``.
Reference fields (``owner``, ``actor``, ``project``, ``author``, ``user``)
carry entity ids; timestamps are RFC 3339 strings. ``docs/formats.md``
documents the full schema.
"""

from __future__ import annotations

import io
import json
import logging
from pathlib import Path
from typing import Any, IO

from ..errors import (
    DuplicateRecord,
    EmptyInput,
    OpennessError,
    SchemaError,
    UnknownReference,
)
from ..model import (
    DIAG_DANGLING_REFERENCE,
    DIAG_DUPLICATE_RECORD,
    DIAG_MALFORMED_LINE,
    DIAG_SCHEMA_VIOLATION,
    EventKind,
    EventStore,
    StoreBuilder,
)
from ..timeutil import format_timestamp, parse_timestamp

logger = logging.getLogger(__name__)

_KINDS_BY_VALUE = {kind.value: kind for kind in EventKind}

# Lines are applied in dependency order, not file order, so a stream may
# carry records in any order.
_PASSES = (("user",), ("project",), ("membership", "pull_request"), ("event",))
_KNOWN_TYPES = tuple(t for types in _PASSES for t in types)


def _require(obj: dict[str, Any], field_name: str, line_number: int) -> Any:
    if field_name not in obj or obj[field_name] is None:
        raise SchemaError("required field missing", line_number=line_number, field=field_name)
    return obj[field_name]


def _require_int(obj: dict[str, Any], field_name: str, line_number: int) -> int:
    value = _require(obj, field_name, line_number)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError("expected an integer", line_number=line_number, field=field_name)
    return value


def _require_str(obj: dict[str, Any], field_name: str, line_number: int) -> str:
    value = _require(obj, field_name, line_number)
    if not isinstance(value, str):
        raise SchemaError("expected a string", line_number=line_number, field=field_name)
    return value


def _require_timestamp(obj: dict[str, Any], field_name: str, line_number: int):
    value = _require_str(obj, field_name, line_number)
    try:
        return parse_timestamp(value)
    except ValueError as exc:
        raise SchemaError(str(exc), line_number=line_number, field=field_name) from exc


def _optional_timestamp(obj: dict[str, Any], field_name: str, line_number: int):
    value = obj.get(field_name)
    if value is None:
        return None
    if not isinstance(value, str):
        raise SchemaError("expected a timestamp string", line_number=line_number, field=field_name)
    try:
        return parse_timestamp(value)
    except ValueError as exc:
        raise SchemaError(str(exc), line_number=line_number, field=field_name) from exc


def _apply_entity(builder: StoreBuilder, kind: str, obj: dict[str, Any], line_number: int) -> None:
    if kind == "user":
        builder.add_user(
            user_id=_require_int(obj, "user_id", line_number),
            login=_require_str(obj, "login", line_number),
        )
    elif kind == "project":
        forked_from = obj.get("forked_from")
        if forked_from is not None and (isinstance(forked_from, bool) or not isinstance(forked_from, int)):
            raise SchemaError("expected an integer or null", line_number=line_number, field="forked_from")
        builder.add_project(
            project_id=_require_int(obj, "project_id", line_number),
            full_name=_require_str(obj, "full_name", line_number),
            owner_id=_require_int(obj, "owner", line_number),
            forked_from=forked_from,
            created_at=_require_timestamp(obj, "created_at", line_number),
        )
    elif kind == "membership":
        builder.add_membership(
            project_id=_require_int(obj, "project", line_number),
            user_id=_require_int(obj, "user", line_number),
            recorded_at=_optional_timestamp(obj, "recorded_at", line_number),
        )
    elif kind == "pull_request":
        merged = obj.get("merged", False)
        if not isinstance(merged, bool):
            raise SchemaError("expected a boolean", line_number=line_number, field="merged")
        builder.add_pull_request(
            pr_id=_require_int(obj, "pr_id", line_number),
            project_id=_require_int(obj, "project", line_number),
            author_id=_require_int(obj, "author", line_number),
            opened_at=_require_timestamp(obj, "opened_at", line_number),
            closed_at=_optional_timestamp(obj, "closed_at", line_number),
            merged=merged,
            head_project=_require_int(obj, "head_project", line_number),
            base_project=_require_int(obj, "base_project", line_number),
        )


def _apply_event(builder: StoreBuilder, obj: dict[str, Any], line_number: int) -> None:
    kind_name = _require_str(obj, "kind", line_number)
    kind = _KINDS_BY_VALUE.get(kind_name)
    if kind is None:
        raise SchemaError(f"unknown event kind {kind_name!r}", line_number=line_number, field="kind")
    subject_id = obj.get("subject_id")
    if subject_id is not None and isinstance(subject_id, bool):
        raise SchemaError("expected an id or string", line_number=line_number, field="subject_id")
    if subject_id is not None and not isinstance(subject_id, (int, str)):
        raise SchemaError("expected an id or string", line_number=line_number, field="subject_id")
    builder.add_event(
        event_id=_require_int(obj, "event_id", line_number),
        kind=kind,
        actor_id=_require_int(obj, "actor", line_number),
        project_id=_require_int(obj, "project", line_number),
        subject_id=subject_id,
        at=_require_timestamp(obj, "at", line_number),
    )


def _handle_error(
    builder: StoreBuilder,
    exc: OpennessError,
    line_number: int,
    raw: str,
    strict: bool,
) -> None:
    if strict:
        if isinstance(exc, SchemaError):
            raise exc
        raise SchemaError(str(exc), line_number=line_number) from exc
    if isinstance(exc, UnknownReference):
        diag_kind = DIAG_DANGLING_REFERENCE
    elif isinstance(exc, DuplicateRecord):
        diag_kind = DIAG_DUPLICATE_RECORD
    else:
        diag_kind = DIAG_SCHEMA_VIOLATION
    builder.diagnostic(diag_kind, str(exc), line_number=line_number, payload=raw)


def load_ndjson(path: str | Path, *, strict: bool = False) -> EventStore:
    """Load an NDJSON event stream into an EventStore.

    In lenient mode (the default) malformed lines, dangling references and
    duplicate records become diagnostics; strict mode raises
    :class:`SchemaError` at the first offence. Raises :class:`EmptyInput`
    when the file contributes no valid records at all.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))

    builder = StoreBuilder()
    parsed: list[tuple[int, str, dict[str, Any], str]] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise SchemaError("expected a JSON object", line_number=line_number)
                record_type = obj.get("type")
                if record_type not in _KNOWN_TYPES:
                    raise SchemaError(
                        f"unknown record type {record_type!r}", line_number=line_number, field="type"
                    )
            except json.JSONDecodeError as exc:
                if strict:
                    raise SchemaError(f"invalid JSON: {exc}", line_number=line_number) from exc
                builder.diagnostic(
                    DIAG_MALFORMED_LINE,
                    f"invalid JSON: {exc}",
                    line_number=line_number,
                    payload=line,
                )
                continue
            except SchemaError as exc:
                _handle_error(builder, exc, line_number, line, strict)
                continue
            parsed.append((line_number, record_type, obj, line))

    for pass_types in _PASSES:
        for line_number, record_type, obj, raw in parsed:
            if record_type not in pass_types:
                continue
            try:
                if record_type == "event":
                    _apply_event(builder, obj, line_number)
                else:
                    _apply_entity(builder, record_type, obj, line_number)
            except OpennessError as exc:
                _handle_error(builder, exc, line_number, raw, strict)

    if builder.record_count == 0:
        raise EmptyInput(f"{path}: no valid records")
    store = builder.build()
    if store.diagnostics:
        logger.info("%s: %d diagnostics collected during load", path, len(store.diagnostics))
    return store


def _jsonable_event(event) -> dict[str, Any]:
    return {
        "type": "event",
        "event_id": event.event_id,
        "kind": event.kind.value,
        "actor": event.actor.user_id,
        "project": event.project.project_id,
        "subject_id": event.subject_id,
        "at": format_timestamp(event.at),
    }


def dump_ndjson(store: EventStore, destination: str | Path | IO[str]) -> int:
    """Serialize a store to NDJSON; returns the number of lines written.

    Output ordering is canonical (users, projects, memberships, pull
    requests, events; each sorted by id/time), so serializing the same
    store always produces identical bytes.
    """
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8") as handle:
            return dump_ndjson(store, handle)

    lines = 0

    def emit(obj: dict[str, Any]) -> None:
        nonlocal lines
        destination.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")
        lines += 1

    for user in sorted(store.users.values(), key=lambda u: u.user_id):
        emit({"type": "user", "user_id": user.user_id, "login": user.login})
    for project in sorted(store.projects.values(), key=lambda p: p.project_id):
        emit(
            {
                "type": "project",
                "project_id": project.project_id,
                "full_name": project.full_name,
                "owner": project.owner.user_id,
                "forked_from": project.forked_from,
                "created_at": format_timestamp(project.created_at),
            }
        )
    for membership in store.memberships:
        emit(
            {
                "type": "membership",
                "project": membership.project.project_id,
                "user": membership.user.user_id,
                "recorded_at": (
                    format_timestamp(membership.recorded_at)
                    if membership.recorded_at is not None
                    else None
                ),
            }
        )
    for pr in store.iter_pull_requests():
        emit(
            {
                "type": "pull_request",
                "pr_id": pr.pr_id,
                "project": pr.project.project_id,
                "author": pr.author.user_id,
                "opened_at": format_timestamp(pr.opened_at),
                "closed_at": format_timestamp(pr.closed_at) if pr.closed_at is not None else None,
                "merged": pr.merged,
                "head_project": pr.head_project,
                "base_project": pr.base_project,
            }
        )
    for event in store.iter_events():
        emit(_jsonable_event(event))
    return lines


def dumps_ndjson(store: EventStore) -> str:
    """Serialize a store to an NDJSON string."""
    buffer = io.StringIO()
    dump_ndjson(store, buffer)
    return buffer.getvalue()
