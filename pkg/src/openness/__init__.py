"""Openness metrics for GitHub-style repositories.

Three metrics over an event dataset:

* community composition (members, collaborators, external contributors,
  external users),
* external-contribution acceptance rate and decision latency,
* time for an external user to become a collaborator.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .model import (  # noqa: E402
    DatasetSummary,
    Diagnostic,
    EventKind,
    EventRecord,
    EventStore,
    MembershipRecord,
    ProjectRef,
    PullRequestRecord,
    StoreBuilder,
    UserRef,
)

__all__ = [
    "DatasetSummary",
    "Diagnostic",
    "EventKind",
    "EventRecord",
    "EventStore",
    "MembershipRecord",
    "ProjectRef",
    "PullRequestRecord",
    "StoreBuilder",
    "UserRef",
    "__version__",
]
