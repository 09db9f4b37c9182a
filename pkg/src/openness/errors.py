"""Exception types shared across the toolkit."""

from __future__ import annotations

from datetime import datetime


class OpennessError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(OpennessError):
    """A record does not conform to the expected input schema."""

    def __init__(self, message: str, *, line_number: int | None = None, field: str | None = None):
        self.line_number = line_number
        self.field = field
        prefix = ""
        if line_number is not None:
            prefix += f"line {line_number}: "
        if field is not None:
            prefix += f"field {field!r}: "
        super().__init__(prefix + message)


class EmptyInput(OpennessError):
    """An operation received no usable data."""


class MissingTable(OpennessError):
    """A mandatory table is absent from a dump directory."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing mandatory table: {name}")


class JoinError(OpennessError):
    """A foreign key in a dump row cannot be resolved (strict mode)."""


class UnknownReference(OpennessError):
    """A record references an entity that is not present in the store."""


class DuplicateRecord(OpennessError):
    """A record violates a uniqueness constraint of the store."""


class AuthError(OpennessError):
    """The remote API rejected the request credentials."""


class RateLimited(OpennessError):
    """The remote API refused the request because the rate limit is exhausted.

    ``reset_at`` carries the instant the quota resets, when the server
    provided one; ``retry_after`` the advertised wait in seconds.
    """

    def __init__(self, message: str, *, reset_at: datetime | None = None, retry_after: float | None = None):
        self.reset_at = reset_at
        self.retry_after = retry_after
        super().__init__(message)


class NotFound(OpennessError):
    """The remote repository (or resource) does not exist or is not visible."""


class NetworkError(OpennessError):
    """A transport-level failure while talking to the remote API."""


class NotOriginalProject(OpennessError):
    """A metric was requested for a fork; metrics apply to original projects only."""


class UnresolvedSubject(OpennessError):
    """An event's subject cannot be resolved within the store."""


class InvalidLifecycle(OpennessError):
    """A pull request's timestamps are inconsistent (e.g. closed before opened)."""


class NotACollaborator(OpennessError):
    """A promotion record was requested for a user not classified as collaborator."""


class NonFiniteValue(OpennessError):
    """A statistic received NaN or an infinite value."""
