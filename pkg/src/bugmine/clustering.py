"""K-medoid trace clustering and automated cluster-set selection.

Traces cluster around medoid traces under either kernel: a non-medoid
joins the medoid with the highest LCS similarity or the lowest DTW
distance. The swap loop accepts a medoid/non-medoid exchange only when it
strictly improves the total configuration cost, scanning medoids then
candidates in ascending trace-index order, so runs are deterministic for a
given seed and guaranteed to terminate.

Automated selection clusters the log several times with different seeds,
scores each cluster set by trace-count-weighted complexity and fitness of
the per-cluster models, and keeps the set with the highest goodness ratio.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .discovery import discover_model, export_model_xml
from .distance import Metric, similarity_matrix
from .ingest import EventLog, Trace, to_sequential
from .metrics import GoodnessReport, complexity, fitness, weighted_goodness

ASSIGNMENT_HEADER = ("case_id", "cluster_index", "is_medoid")


@dataclass(frozen=True)
class Cluster:
    medoid: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class ClusterSet:
    """A k-way partition of trace indices with one medoid per cluster."""

    clusters: tuple[Cluster, ...]
    metric: Metric
    k: int
    total_cost: int
    seed: int

    def labels(self, n: int) -> list[int]:
        """Cluster index per trace position."""
        out = [-1] * n
        for index, cluster in enumerate(self.clusters):
            for member in cluster.members:
                out[member] = index
        return out

    def medoids(self) -> list[int]:
        return [cluster.medoid for cluster in self.clusters]


def _assign(medoids: list[int], metric: Metric, matrix: np.ndarray) -> dict[int, int]:
    medoid_set = set(medoids)
    assignment: dict[int, int] = {}
    for i in range(len(matrix)):
        if i in medoid_set:
            continue
        best = medoids[0]
        best_score = matrix[i][best]
        for m in medoids[1:]:
            score = matrix[i][m]
            if metric.better(score, best_score):
                best, best_score = m, score
        assignment[i] = best
    return assignment


def assign_to_medoids(
    traces: Sequence,
    medoid_indices: Sequence[int],
    metric: Metric,
    matrix: np.ndarray,
) -> dict[int, int]:
    """Map each non-medoid trace index to its closest medoid index.

    LCS: highest similarity wins; DTW: lowest distance wins; ties go to the
    lowest medoid index.
    """
    medoids = sorted(medoid_indices)
    if len(set(medoids)) != len(medoids):
        raise ValueError("medoid indices must be distinct")
    if medoids and not 0 <= medoids[0] <= medoids[-1] < len(matrix):
        raise ValueError("medoid index out of range")
    return _assign(medoids, metric, matrix)


def configuration_cost(
    assignment: dict[int, int], metric: Metric, matrix: np.ndarray
) -> int:
    """Total score of a configuration: each non-medoid's score to its medoid."""
    return int(sum(matrix[i][m] for i, m in assignment.items()))


def _evaluate(medoids: list[int], metric: Metric, matrix: np.ndarray) -> int:
    return configuration_cost(_assign(medoids, metric, matrix), metric, matrix)


def k_medoid(
    traces: Sequence,
    k: int,
    metric: Metric,
    seed: int,
    matrix: np.ndarray | None = None,
    cost_log: list[int] | None = None,
) -> ClusterSet:
    """Cluster traces into ``k`` groups around medoids.

    Initial medoids are sampled uniformly without replacement from ``seed``.
    ``matrix`` lets callers reuse a precomputed score matrix; ``cost_log``,
    when given, receives the total cost after the initial configuration and
    after each accepted swap.
    """
    n = len(traces)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if matrix is None:
        matrix = similarity_matrix(traces, metric)

    rng = random.Random(seed)
    medoids = sorted(rng.sample(range(n), k))
    cost = _evaluate(medoids, metric, matrix)
    if cost_log is not None:
        cost_log.append(cost)

    improved = True
    while improved:
        improved = False
        medoid_set = set(medoids)
        for position, m in enumerate(medoids):
            for candidate in range(n):
                if candidate in medoid_set:
                    continue
                trial = sorted(medoids[:position] + [candidate] + medoids[position + 1 :])
                trial_cost = _evaluate(trial, metric, matrix)
                if metric.better(trial_cost, cost):
                    medoids, cost = trial, trial_cost
                    if cost_log is not None:
                        cost_log.append(cost)
                    improved = True
                    break
            if improved:
                break

    assignment = assign_to_medoids(traces, medoids, metric, matrix)
    members: dict[int, list[int]] = {m: [m] for m in medoids}
    for i, m in assignment.items():
        members[m].append(i)
    return ClusterSet(
        clusters=tuple(Cluster(m, tuple(sorted(members[m]))) for m in medoids),
        metric=metric,
        k=k,
        total_cost=cost,
        seed=seed,
    )


def write_assignment_csv(
    cluster_set: ClusterSet, traces: Sequence[Trace], sink: TextIO
) -> None:
    """Cluster assignment export: one row per trace, in trace order."""
    labels = cluster_set.labels(len(traces))
    medoids = set(cluster_set.medoids())
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(ASSIGNMENT_HEADER)
    for i, trace in enumerate(traces):
        writer.writerow(
            (trace.case_id, labels[i], "true" if i in medoids else "false")
        )


def cluster_sublogs(cluster_set: ClusterSet, log: EventLog) -> list[EventLog]:
    """Per-cluster event logs, cluster order preserved."""
    traces = to_sequential(log)
    return [
        log.sublog(traces[i].case_id for i in cluster.members)
        for cluster in cluster_set.clusters
    ]


def score_cluster_set(
    cluster_set: ClusterSet, log: EventLog, include_endpoints: bool = True
) -> GoodnessReport:
    """Discover one model per cluster (full resolution) and aggregate goodness."""
    per_cluster = []
    for cluster, sublog in zip(cluster_set.clusters, cluster_sublogs(cluster_set, log)):
        model_xml = export_model_xml(discover_model(sublog, 100.0, 100.0))
        per_cluster.append(
            (
                complexity(model_xml, include_endpoints),
                fitness(model_xml, sublog),
                len(cluster.members),
            )
        )
    return weighted_goodness(per_cluster)


def pick_best_run(reports: Sequence[GoodnessReport]) -> int:
    """Index of the report with the maximum goodness ratio; earliest run wins ties."""
    if not reports:
        raise ValueError("no runs to pick from")
    best = 0
    for i in range(1, len(reports)):
        if reports[i].g_ratio > reports[best].g_ratio:
            best = i
    return best


def select_best_cluster_set(
    log: EventLog,
    k: int,
    metric: Metric,
    runs: int = 3,
    seeds: Sequence[int] | None = None,
    include_endpoints: bool = True,
) -> tuple[ClusterSet, list[GoodnessReport]]:
    """Cluster the log ``runs`` times and keep the set with the best goodness.

    Seeds default to 1..runs and must be distinct. Returns the winning
    cluster set together with every run's goodness report (run order).
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if seeds is None:
        seeds = list(range(1, runs + 1))
    seeds = list(seeds)
    if len(seeds) != runs:
        raise ValueError(f"expected {runs} seeds, got {len(seeds)}")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")

    traces = to_sequential(log)
    matrix = similarity_matrix(traces, metric)
    cluster_sets = [k_medoid(traces, k, metric, seed, matrix=matrix) for seed in seeds]
    reports = [
        score_cluster_set(cs, log, include_endpoints=include_endpoints)
        for cs in cluster_sets
    ]
    return cluster_sets[pick_best_run(reports)], reports
