"""Goodness metrics for discovered process models.

Complexity is McCabe's cyclomatic number ``e - n + 2`` over the model
graph; fitness is the frequency-weighted fraction of unique traces whose
every consecutive activity pair is a model edge. DCC is the percentage
decrease in complexity of a cluster's model versus the whole-log model,
truncated to one decimal. Weighted aggregation combines per-cluster scores
into the selection ratio used by automated clustering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, TextIO

from .discovery import import_model_xml
from .ingest import EventLog, to_sequential


@dataclass(frozen=True)
class UniqueTrace:
    activities: tuple[str, ...]
    frequency: int
    valid: bool


@dataclass(frozen=True)
class FitnessAccumulator:
    """Replay tally: unique traces with frequencies and validity flags."""

    unique_traces: tuple[UniqueTrace, ...]
    freq_valid_product: int
    freq_sum: int

    @property
    def fitness(self) -> float:
        return self.freq_valid_product / self.freq_sum


@dataclass(frozen=True)
class ClusterScore:
    traces: int
    complexity: float
    fitness: float


@dataclass(frozen=True)
class GoodnessReport:
    """Trace-count-weighted complexity/fitness scores and their ratio."""

    c_score: float
    f_score: float
    g_ratio: float
    per_cluster: tuple[ClusterScore, ...]


def complexity(model_xml: str | TextIO, include_endpoints: bool = True) -> int:
    """Cyclomatic complexity ``e - n + 2`` of the model graph.

    By default the artificial start/end markers and their dashed edges are
    counted; pass ``include_endpoints=False`` to count activity nodes and
    solid transitions only.
    """
    model = import_model_xml(model_xml)
    e = model.edge_count(include_endpoints)
    n = model.node_count(include_endpoints)
    return e - n + 2


def replay(adjacency: dict[str, set[str]], traces: Sequence) -> FitnessAccumulator:
    """Replay traces against a successor map, tallying unique-trace validity.

    A trace is valid when every consecutive activity pair is an edge;
    single-activity traces are vacuously valid.
    """
    order: list[tuple[str, ...]] = []
    freq: dict[tuple[str, ...], int] = {}
    for trace in traces:
        key = tuple(getattr(trace, "activities", trace))
        if key not in freq:
            order.append(key)
            freq[key] = 0
        freq[key] += 1

    unique = []
    freq_valid_product = 0
    freq_sum = 0
    for key in order:
        valid = all(b in adjacency.get(a, ()) for a, b in zip(key, key[1:]))
        unique.append(UniqueTrace(key, freq[key], valid))
        freq_sum += freq[key]
        if valid:
            freq_valid_product += freq[key]
    return FitnessAccumulator(tuple(unique), freq_valid_product, freq_sum)


def fitness(model_xml: str | TextIO, log: EventLog) -> float:
    """Fraction of the log (frequency-weighted) fully replayable on the model."""
    if not log.events:
        raise ValueError("cannot compute fitness of an empty log")
    model = import_model_xml(model_xml)
    return replay(model.adjacency(), to_sequential(log)).fitness


def dcc(main_complexity: int, cluster_complexity: int) -> float:
    """Percentage decrease in complexity, truncated toward zero to one decimal."""
    if main_complexity <= 0:
        raise ValueError("main model complexity must be positive")
    tenths = 1000 * (main_complexity - cluster_complexity)
    if tenths >= 0:
        return (tenths // main_complexity) / 10.0
    return -((-tenths) // main_complexity) / 10.0


def weighted_goodness(
    per_cluster: Sequence[tuple[float, float, int]]
) -> GoodnessReport:
    """Aggregate (complexity, fitness, trace_count) triples per cluster.

    Scores are trace-count-weighted means; the goodness ratio is
    weighted fitness over weighted complexity.
    """
    if not per_cluster:
        raise ValueError("weighted_goodness needs at least one cluster")
    if any(t <= 0 for _, _, t in per_cluster):
        raise ValueError("cluster trace counts must be positive")
    total = sum(t for _, _, t in per_cluster)
    c_score = sum(c * t for c, _, t in per_cluster) / total
    f_score = sum(f * t for _, f, t in per_cluster) / total
    if c_score <= 0:
        raise ValueError("weighted complexity must be positive")
    return GoodnessReport(
        c_score=c_score,
        f_score=f_score,
        g_ratio=f_score / c_score,
        per_cluster=tuple(ClusterScore(t, c, f) for c, f, t in per_cluster),
    )


def goodness_to_dict(
    report: GoodnessReport, main_complexity: int | None = None
) -> dict:
    """JSON-ready form of a goodness report; per-cluster DCC when the
    whole-log complexity is supplied."""
    return {
        "c_score": report.c_score,
        "f_score": report.f_score,
        "g_ratio": report.g_ratio,
        "per_cluster": [
            {
                "cluster": i,
                "traces": score.traces,
                "complexity": score.complexity,
                "fitness": score.fitness,
                "dcc": (
                    dcc(main_complexity, int(score.complexity))
                    if main_complexity is not None
                    else None
                ),
            }
            for i, score in enumerate(report.per_cluster)
        ],
    }
