"""Timestamp parsing and formatting helpers.

All timestamps are normalized to UTC on the way in. Inputs without an
explicit offset (bare ISO strings, ``YYYY-MM-DD HH:MM:SS`` dump rows) are
interpreted as UTC.
"""

from __future__ import annotations

from datetime import datetime, timezone

UTC = timezone.utc

DAY_SECONDS = 86400.0


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 or ``YYYY-MM-DD HH:MM:SS`` string into a UTC datetime.

    Raises ValueError for unparseable input.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC)


def format_timestamp(dt: datetime) -> str:
    """Render a datetime as an RFC 3339 UTC string with a ``Z`` suffix."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC).isoformat().replace("+00:00", "Z")


def days_between(start: datetime, end: datetime) -> float:
    """Elapsed time from ``start`` to ``end`` in fractional days."""
    return (end - start).total_seconds() / DAY_SECONDS
