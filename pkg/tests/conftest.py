"""Shared builders for synthetic logs, traces and models."""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone
from typing import Sequence

import pytest

from bugmine.discovery import Edge, ProcessModel
from bugmine.ingest import Event, EventLog, case_sort_key

T0 = datetime(2013, 1, 1, tzinfo=timezone.utc)

HOUR = 3600


def log_from_sequences(
    sequences: Sequence[tuple[str, Sequence[str]]],
    start: datetime = T0,
    step_s: int = HOUR,
) -> EventLog:
    """Event log with one case per (case_id, activities) pair, fixed time step."""
    keyed = []
    for position, (case_id, activities) in enumerate(sequences):
        for i, activity in enumerate(activities):
            keyed.append(
                (case_sort_key(case_id), start + timedelta(seconds=i * step_s), position, case_id, activity)
            )
    keyed.sort(key=lambda item: (item[0], item[1], item[2]))
    return EventLog(
        [
            Event(case_id, ts, activity, ordinal=i)
            for i, (_, ts, _, case_id, activity) in enumerate(keyed)
        ]
    )


def random_log(
    rng: random.Random,
    max_cases: int = 8,
    max_len: int = 8,
    alphabet: Sequence[str] = ("AAA", "BBB", "CCC", "DDD"),
    max_gap_s: int = 400 * 24 * HOUR // 24,
) -> EventLog:
    """Random small event log with strictly increasing per-case timestamps."""
    sequences = []
    for case in range(1, rng.randint(1, max_cases) + 1):
        length = rng.randint(1, max_len)
        sequences.append((str(case), [rng.choice(alphabet) for _ in range(length)]))
    events = []
    keyed = []
    for position, (case_id, activities) in enumerate(sequences):
        ts = T0
        for activity in activities:
            keyed.append((case_sort_key(case_id), ts, position, case_id, activity))
            ts = ts + timedelta(seconds=rng.randint(0, max_gap_s))
    keyed.sort(key=lambda item: (item[0], item[1], item[2]))
    for i, (_, ts, _, case_id, activity) in enumerate(keyed):
        events.append(Event(case_id, ts, activity, ordinal=i))
    return EventLog(events)


def simple_model(
    edges: dict[tuple[str, str], int],
    nodes: dict[str, int] | None = None,
    start: dict[str, int] | None = None,
    end: dict[str, int] | None = None,
) -> ProcessModel:
    """Hand-built model; node/start/end maps default to something consistent."""
    if nodes is None:
        names = sorted({a for pair in edges for a in pair})
        nodes = {name: 1 for name in names}
    sources = {s for s, _ in edges}
    targets = {t for _, t in edges}
    if start is None:
        heads = sorted(set(nodes) - targets) or sorted(nodes)[:1]
        start = {h: 1 for h in heads}
    if end is None:
        tails = sorted(set(nodes) - sources) or sorted(nodes)[-1:]
        end = {t: 1 for t in tails}
    return ProcessModel(
        nodes=dict(sorted(nodes.items())),
        edges={pair: Edge(freq) for pair, freq in sorted(edges.items())},
        start_edges=dict(sorted(start.items())),
        end_edges=dict(sorted(end.items())),
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20130101)
