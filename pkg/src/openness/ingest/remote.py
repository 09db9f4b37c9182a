"""Live ingestion from a GitHub-compatible REST API.

Fetches ``/repos/{owner}/{name}`` plus its ``issues``, ``pulls``,
``issues/events`` and ``commits`` collections and normalizes them into an
EventStore. Requests run sequentially (one host, one connection) and the
client honors ``X-RateLimit-Remaining`` / ``Retry-After``: depending on
configuration it either aborts with :class:`RateLimited` or sleeps until
the quota resets.

Close/merge/reopen attribution comes from the issue-events feed, which is
the only listed endpoint that names the acting user; comment feeds are not
crawled, so remote stores carry no comment events.
"""

from __future__ import annotations

import logging
import os
import time
from datetime import datetime, timezone
from typing import Any, Callable, Iterator

import httpx

from ..errors import AuthError, NetworkError, NotFound, RateLimited
from ..model import DIAG_COMMIT_AUTHOR_LINKAGE, DIAG_DANGLING_REFERENCE, EventKind, EventStore, StoreBuilder
from ..timeutil import format_timestamp, parse_timestamp

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.github.com"
TOKEN_ENV_VAR = "OPENNESS_TOKEN"

# Sentinel repository id for heads whose fork was deleted upstream.
UNKNOWN_REPO_ID = -1


class ForgeClient:
    """Minimal synchronous REST client with pagination and rate-limit handling."""

    def __init__(
        self,
        *,
        base_url: str = DEFAULT_BASE_URL,
        token: str | None = None,
        per_page: int = 100,
        on_rate_limit: str = "abort",
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if on_rate_limit not in ("abort", "wait"):
            raise ValueError(f"on_rate_limit must be 'abort' or 'wait', got {on_rate_limit!r}")
        headers = {"Accept": "application/vnd.github.v3+json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self.per_page = per_page
        self.on_rate_limit = on_rate_limit
        self._sleep = sleep
        self._client = httpx.Client(
            base_url=base_url, headers=headers, timeout=timeout, transport=transport
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ForgeClient":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def _rate_limit_error(self, response: httpx.Response) -> RateLimited:
        reset_at = None
        retry_after = None
        reset_header = response.headers.get("X-RateLimit-Reset")
        if reset_header is not None:
            try:
                reset_at = datetime.fromtimestamp(int(reset_header), tz=timezone.utc)
            except (ValueError, OverflowError):
                reset_at = None
        retry_header = response.headers.get("Retry-After")
        if retry_header is not None:
            try:
                retry_after = float(retry_header)
            except ValueError:
                retry_after = None
        detail = f"rate limit exhausted for {response.request.url.path}"
        if reset_at is not None:
            detail += f" (resets at {format_timestamp(reset_at)})"
        return RateLimited(detail, reset_at=reset_at, retry_after=retry_after)

    def get_json(self, path: str, params: dict[str, Any] | None = None) -> Any:
        """GET a JSON document, retrying after a rate-limit pause if configured."""
        while True:
            try:
                response = self._client.get(path, params=params)
            except httpx.TransportError as exc:
                raise NetworkError(f"{path}: {exc}") from exc

            if response.status_code in (403, 429):
                if response.headers.get("X-RateLimit-Remaining") == "0" or "Retry-After" in response.headers:
                    error = self._rate_limit_error(response)
                    if self.on_rate_limit == "abort":
                        raise error
                    pause = error.retry_after
                    if pause is None and error.reset_at is not None:
                        pause = max(0.0, (error.reset_at - datetime.now(timezone.utc)).total_seconds())
                    pause = pause if pause is not None else 60.0
                    logger.warning("rate limited; sleeping %.0f s before retrying %s", pause, path)
                    self._sleep(pause)
                    continue
                raise AuthError(f"{path}: access forbidden (HTTP {response.status_code})")
            if response.status_code == 401:
                raise AuthError(f"{path}: authentication failed (HTTP 401)")
            if response.status_code == 404:
                raise NotFound(f"{path}: not found")
            try:
                response.raise_for_status()
            except httpx.HTTPStatusError as exc:
                raise NetworkError(f"{path}: unexpected status {response.status_code}") from exc
            return response.json()

    def paginate(self, path: str, params: dict[str, Any] | None = None) -> Iterator[Any]:
        """Yield items across pages until a short or empty page appears."""
        page = 1
        while True:
            page_params = dict(params or {})
            page_params.update({"per_page": self.per_page, "page": page})
            items = self.get_json(path, page_params)
            if not isinstance(items, list):
                raise NetworkError(f"{path}: expected a JSON array page")
            yield from items
            if len(items) < self.per_page:
                return
            page += 1


def _actor_fields(obj: Any) -> tuple[int, str] | None:
    if not isinstance(obj, dict):
        return None
    user_id = obj.get("id")
    login = obj.get("login")
    if isinstance(user_id, int) and isinstance(login, str) and login:
        return user_id, login
    return None


def fetch_remote(
    repo: str,
    auth: str | None = None,
    since: datetime | None = None,
    *,
    base_url: str = DEFAULT_BASE_URL,
    per_page: int = 100,
    on_rate_limit: str = "abort",
    transport: httpx.BaseTransport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> EventStore:
    """Crawl ``owner/name`` into an EventStore.

    ``auth`` falls back to the ``OPENNESS_TOKEN`` environment variable.
    Synthesized events (openings, commits) get deterministic ids above the
    largest server-side event id, so identical remote state always yields
    the same store.
    """
    if "/" not in repo:
        raise ValueError(f"repository must be written owner/name, got {repo!r}")
    token = auth if auth is not None else os.environ.get(TOKEN_ENV_VAR)
    since_param = {"since": format_timestamp(since)} if since is not None else {}

    with ForgeClient(
        base_url=base_url,
        token=token,
        per_page=per_page,
        on_rate_limit=on_rate_limit,
        transport=transport,
        sleep=sleep,
    ) as client:
        repo_doc = client.get_json(f"/repos/{repo}")
        pulls = list(client.paginate(f"/repos/{repo}/pulls", {"state": "all"}))
        issues = list(client.paginate(f"/repos/{repo}/issues", {"state": "all", **since_param}))
        issue_events = list(client.paginate(f"/repos/{repo}/issues/events"))
        commits = list(client.paginate(f"/repos/{repo}/commits", dict(since_param)))

    builder = StoreBuilder()

    owner = _actor_fields(repo_doc.get("owner"))
    if owner is None:
        raise NetworkError(f"/repos/{repo}: repository document has no owner")
    builder.add_user(*owner)

    forked_from = None
    if repo_doc.get("fork"):
        parent = repo_doc.get("parent") or {}
        parent_id = parent.get("id")
        forked_from = parent_id if isinstance(parent_id, int) else UNKNOWN_REPO_ID
        if forked_from == UNKNOWN_REPO_ID:
            builder.diagnostic(
                DIAG_DANGLING_REFERENCE,
                f"{repo} is a fork but its parent repository was not reported",
            )
    project_id = repo_doc["id"]
    builder.add_project(
        project_id=project_id,
        full_name=repo_doc.get("full_name", repo),
        owner_id=owner[0],
        forked_from=forked_from,
        created_at=parse_timestamp(repo_doc["created_at"]),
    )

    def ensure_user(obj: Any) -> int | None:
        fields = _actor_fields(obj)
        if fields is None:
            return None
        if fields[0] not in builder.users:
            builder.add_user(*fields)
        return fields[0]

    # Server-side events keep their real ids; synthesized events are
    # numbered after the largest one seen.
    real_ids = [e.get("id") for e in issue_events if isinstance(e.get("id"), int)]
    next_synthetic = (max(real_ids) + 1) if real_ids else 1

    def synth_id() -> int:
        nonlocal next_synthetic
        value = next_synthetic
        next_synthetic += 1
        return value

    if since is not None:
        pulls = [p for p in pulls if parse_timestamp(p["created_at"]) >= since]

    for pull in sorted(pulls, key=lambda p: p["number"]):
        author_id = ensure_user(pull.get("user"))
        if author_id is None:
            builder.diagnostic(
                DIAG_DANGLING_REFERENCE,
                f"pull request {pull.get('number')} has no resolvable author; skipped",
            )
            continue
        head_repo = (pull.get("head") or {}).get("repo") or {}
        base_repo = (pull.get("base") or {}).get("repo") or {}
        head_id = head_repo.get("id") if isinstance(head_repo.get("id"), int) else UNKNOWN_REPO_ID
        base_id = base_repo.get("id") if isinstance(base_repo.get("id"), int) else project_id
        opened_at = parse_timestamp(pull["created_at"])
        closed_at = parse_timestamp(pull["closed_at"]) if pull.get("closed_at") else None
        builder.add_pull_request(
            pr_id=pull["number"],
            project_id=project_id,
            author_id=author_id,
            opened_at=opened_at,
            closed_at=closed_at,
            merged=bool(pull.get("merged_at")),
            head_project=head_id,
            base_project=base_id,
        )
        builder.add_event(
            event_id=synth_id(),
            kind=EventKind.PULL_REQUEST_OPENED,
            actor_id=author_id,
            project_id=project_id,
            subject_id=pull["number"],
            at=opened_at,
        )

    plain_issues = [i for i in issues if "pull_request" not in i]
    for issue in sorted(plain_issues, key=lambda i: i["number"]):
        reporter_id = ensure_user(issue.get("user"))
        if reporter_id is None:
            builder.diagnostic(
                DIAG_DANGLING_REFERENCE,
                f"issue {issue.get('number')} has no resolvable reporter; skipped",
            )
            continue
        builder.add_event(
            event_id=synth_id(),
            kind=EventKind.ISSUE_OPENED,
            actor_id=reporter_id,
            project_id=project_id,
            subject_id=issue["number"],
            at=parse_timestamp(issue["created_at"]),
        )

    for entry in issue_events:
        action = entry.get("event")
        issue = entry.get("issue") or {}
        number = issue.get("number")
        if not isinstance(number, int):
            continue
        about_pull = "pull_request" in issue
        if action == "merged":
            kind = EventKind.PULL_REQUEST_MERGED
        elif action == "closed":
            kind = EventKind.PULL_REQUEST_CLOSED if about_pull else EventKind.ISSUE_CLOSED
        elif action == "reopened":
            kind = EventKind.PULL_REQUEST_REOPENED if about_pull else EventKind.ISSUE_REOPENED
        else:
            continue
        actor_id = ensure_user(entry.get("actor"))
        if actor_id is None:
            builder.diagnostic(
                DIAG_DANGLING_REFERENCE,
                f"issue event {entry.get('id')} has no resolvable actor; skipped",
            )
            continue
        event_id = entry.get("id") if isinstance(entry.get("id"), int) else synth_id()
        builder.add_event(
            event_id=event_id,
            kind=kind,
            actor_id=actor_id,
            project_id=project_id,
            subject_id=number,
            at=parse_timestamp(entry["created_at"]),
        )

    linked = 0
    unlinked = 0
    for commit in commits:
        author_id = ensure_user(commit.get("author"))
        if author_id is None:
            unlinked += 1  # author email not linked to an account
            continue
        linked += 1
        builder.add_event(
            event_id=synth_id(),
            kind=EventKind.COMMIT_AUTHORED,
            actor_id=author_id,
            project_id=project_id,
            subject_id=commit.get("sha"),
            at=parse_timestamp(commit["commit"]["author"]["date"]),
        )
    if linked or unlinked:
        builder.diagnostic(
            DIAG_COMMIT_AUTHOR_LINKAGE,
            f"commit authors: {linked} linked to an account, {unlinked} unlinked (skipped)",
        )

    store = builder.build()
    logger.info("%s: fetched %d events", repo, sum(len(v) for v in store.events.values()))
    return store
