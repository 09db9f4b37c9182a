"""Ingestion entry points: NDJSON streams, CSV dumps, and live API crawls."""

from __future__ import annotations

from ..model import DatasetSummary, EventStore
from .ghtorrent import load_ghtorrent_dump
from .ndjson import dump_ndjson, dumps_ndjson, load_ndjson
from .remote import ForgeClient, fetch_remote

__all__ = [
    "ForgeClient",
    "dataset_summary",
    "dump_ndjson",
    "dumps_ndjson",
    "fetch_remote",
    "load_ghtorrent_dump",
    "load_ndjson",
]


def dataset_summary(store: EventStore) -> DatasetSummary:
    """Headline counts: projects, originals, users, issues, PRs, commits."""
    return store.summary()
