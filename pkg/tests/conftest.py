"""Shared fixtures: canned datasets and a mock HTTP transport."""

from __future__ import annotations

import json
from pathlib import Path

import httpx
import pytest

from openness.ingest import load_ndjson

FIXTURES = Path(__file__).parent / "fixtures"
HTTP_FIXTURES = FIXTURES / "http"


@pytest.fixture(scope="session")
def small_path() -> Path:
    return FIXTURES / "small.ndjson"


@pytest.fixture(scope="session")
def small_manifest() -> dict:
    return json.loads((FIXTURES / "small_manifest.json").read_text())


@pytest.fixture(scope="session")
def oracle_path() -> Path:
    return FIXTURES / "oracle.ndjson"


@pytest.fixture(scope="session")
def oracle_store(oracle_path):
    return load_ndjson(oracle_path)


@pytest.fixture(scope="session")
def oracle_expected() -> dict:
    return json.loads((FIXTURES / "oracle_expected.json").read_text())


def _page(items: list, request: httpx.Request) -> list:
    params = request.url.params
    page = int(params.get("page", "1"))
    per_page = int(params.get("per_page", "30"))
    return items[(page - 1) * per_page : page * per_page]


def make_repo_transport(recorder: list | None = None) -> httpx.MockTransport:
    """Serve the canned two-PR repository from tests/fixtures/http."""
    repo = json.loads((HTTP_FIXTURES / "repo.json").read_text())
    pages = {
        "/repos/octo/widget/pulls": json.loads((HTTP_FIXTURES / "pulls.json").read_text()),
        "/repos/octo/widget/issues": json.loads((HTTP_FIXTURES / "issues.json").read_text()),
        "/repos/octo/widget/issues/events": json.loads((HTTP_FIXTURES / "events.json").read_text()),
        "/repos/octo/widget/commits": json.loads((HTTP_FIXTURES / "commits.json").read_text()),
    }
    headers = {"X-RateLimit-Remaining": "4999"}

    def handler(request: httpx.Request) -> httpx.Response:
        if recorder is not None:
            recorder.append(request)
        path = request.url.path
        if path == "/repos/octo/widget":
            return httpx.Response(200, json=repo, headers=headers)
        if path in pages:
            return httpx.Response(200, json=_page(pages[path], request), headers=headers)
        return httpx.Response(404, json={"message": "Not Found"}, headers=headers)

    return httpx.MockTransport(handler)


def make_rate_limited_transport(reset_epoch: int = 1325376000) -> httpx.MockTransport:
    """Every request answers 403 with an exhausted rate-limit quota."""
    body = json.loads((HTTP_FIXTURES / "rate_limited.json").read_text())

    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(
            403,
            json=body,
            headers={
                "X-RateLimit-Remaining": "0",
                "X-RateLimit-Reset": str(reset_epoch),
            },
        )

    return httpx.MockTransport(handler)
