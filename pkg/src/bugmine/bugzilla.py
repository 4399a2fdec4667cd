"""Minimal Bugzilla REST client for closed-bug ids and per-bug history.

The HTTP transport is injected as a plain callable ``url -> (status, body)``
so tests replay recorded JSON fixtures without touching the network. Query
URLs follow the Bugzilla REST conventions:

  {base}/bug?status=RESOLVED&status=VERIFIED&creation_time={from}
      &creation_time_to={to}&limit={page_size}&offset={offset}
  {base}/bug/{id}/history
"""

from __future__ import annotations

import json
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from datetime import date
from typing import Callable, Iterable

from .ingest import HistoryRecord, case_sort_key, parse_timestamp

CLOSED_STATUSES = frozenset({"RESOLVED", "VERIFIED"})

RETRY_BASE_DELAY_S = 0.5

Transport = Callable[[str], tuple[int, str]]
Sleeper = Callable[[float], None]


class TransportError(RuntimeError):
    """HTTP request kept failing after the configured retries."""


class DecodeError(ValueError):
    """Response body is not the JSON shape Bugzilla documents."""


class BugNotFoundError(KeyError):
    def __init__(self, bug_id: str) -> None:
        super().__init__(bug_id)
        self.bug_id = bug_id

    def __str__(self) -> str:
        return f"bug {self.bug_id} not found"


@dataclass(frozen=True)
class FetchSpec:
    """Where and what to fetch, plus paging and retry policy."""

    base_url: str
    date_from: date
    date_to: date
    page_size: int = 500
    max_retries: int = 3
    delay_s: float = 0.0

    def __post_init__(self) -> None:
        if self.date_from > self.date_to:
            raise ValueError("date_from must not be after date_to")
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


def urllib_transport(url: str) -> tuple[int, str]:
    """Default transport; tests should inject fixture-backed callables instead."""
    try:
        with urllib.request.urlopen(url) as response:
            return response.status, response.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read().decode("utf-8", errors="replace")


def _request(
    spec: FetchSpec,
    url: str,
    transport: Transport,
    sleep: Sleeper,
    fail_fast: frozenset[int] = frozenset(),
) -> tuple[int, str]:
    """Fetch with exponential backoff; statuses in ``fail_fast`` skip retries."""
    last: str | None = None
    for attempt in range(spec.max_retries + 1):
        if attempt:
            sleep(RETRY_BASE_DELAY_S * 2 ** (attempt - 1))
        elif spec.delay_s:
            sleep(spec.delay_s)
        try:
            status, body = transport(url)
        except OSError as exc:
            last = f"transport failure: {exc}"
            continue
        if 200 <= status < 300 or status in fail_fast:
            return status, body
        last = f"HTTP {status}"
    raise TransportError(f"{url}: {last} after {spec.max_retries} retries")


def _decode(body: str, url: str) -> dict:
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"{url}: invalid JSON ({exc})") from None
    if not isinstance(payload, dict) or not isinstance(payload.get("bugs"), list):
        raise DecodeError(f"{url}: expected an object with a 'bugs' array")
    return payload


def _ids_url(spec: FetchSpec, offset: int) -> str:
    return (
        f"{spec.base_url}/bug?status=RESOLVED&status=VERIFIED"
        f"&creation_time={spec.date_from.isoformat()}"
        f"&creation_time_to={spec.date_to.isoformat()}"
        f"&limit={spec.page_size}&offset={offset}"
    )


def fetch_closed_bug_ids(
    spec: FetchSpec, transport: Transport, sleep: Sleeper = time.sleep
) -> list[str]:
    """Ids of bugs closed (Resolved or Verified) in the date window.

    Pages through the endpoint, filters on status client-side as well,
    dedupes, and returns ids in ascending order.
    """
    ids: set[str] = set()
    offset = 0
    while True:
        url = _ids_url(spec, offset)
        _, body = _request(spec, url, transport, sleep)
        bugs = _decode(body, url)["bugs"]
        for bug in bugs:
            if not isinstance(bug, dict) or "id" not in bug:
                raise DecodeError(f"{url}: bug entry without an id")
            if str(bug.get("status", "")).upper() in CLOSED_STATUSES:
                ids.add(str(bug["id"]))
        if len(bugs) < spec.page_size:
            return sorted(ids, key=case_sort_key)
        offset += spec.page_size


def fetch_bug_history(
    spec: FetchSpec, bug_id: str, transport: Transport, sleep: Sleeper = time.sleep
) -> list[HistoryRecord]:
    """All history records of one bug, server order, one per field change."""
    if not bug_id:
        raise ValueError("bug_id must be non-empty")
    url = f"{spec.base_url}/bug/{bug_id}/history"
    status, body = _request(spec, url, transport, sleep, fail_fast=frozenset({404}))
    if status == 404:
        raise BugNotFoundError(bug_id)
    payload = _decode(body, url)
    if not payload["bugs"]:
        raise BugNotFoundError(bug_id)
    entry = payload["bugs"][0]
    history = entry.get("history")
    if not isinstance(history, list):
        raise DecodeError(f"{url}: bug entry without a 'history' array")

    records = []
    for event in history:
        try:
            when = parse_timestamp(str(event["when"]))
            who = str(event["who"])
            changes = event["changes"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DecodeError(f"{url}: malformed history entry ({exc})") from None
        if not isinstance(changes, list):
            raise DecodeError(f"{url}: history entry 'changes' is not an array")
        for change in changes:
            try:
                records.append(
                    HistoryRecord(
                        bug_id=bug_id,
                        who=who,
                        when=when,
                        what=str(change["field_name"]),
                        removed=str(change.get("removed", "")),
                        added=str(change.get("added", "")),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DecodeError(f"{url}: malformed change entry ({exc})") from None
    return records


def fetch_history_for_bugs(
    spec: FetchSpec,
    bug_ids: Iterable[str],
    transport: Transport,
    sleep: Sleeper = time.sleep,
) -> list[HistoryRecord]:
    """History of several bugs concatenated in the given id order."""
    records: list[HistoryRecord] = []
    for bug_id in bug_ids:
        records.extend(fetch_bug_history(spec, bug_id, transport, sleep))
    return records
