"""Analyst reports over event logs and annotated models.

Covers the four lifecycle questions: self-loops (an activity directly
following itself), back-forth ping-pongs (A -> B -> A triples, overlaps
counted), which resolution preceded each reopen, and which transitions
are bottlenecks relative to day thresholds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .discovery import SECONDS_PER_DAY, ProcessModel
from .ingest import EventLog, to_sequential

#: Resolution activities that can precede a reopen, report order.
REOPEN_FACTORS = ("SRV", "REF", "RED", "REX", "REN", "REI", "REW")

REOPEN_CODE = "SRR"

UNCLASSIFIED = "unclassified"

DEFAULT_THRESHOLDS_DAYS = (500.0, 1000.0)

HISTOGRAM_HEADER = ("label", "cluster", "value")


@dataclass(frozen=True)
class LoopReport:
    """Self-loop counts and, per activity, its most frequent ping-pong partner."""

    self_loops: dict[str, int]
    back_forth: dict[str, tuple[str, int]]


@dataclass(frozen=True)
class FactorStat:
    cases: int
    percentage: float


@dataclass(frozen=True)
class ReopenReport:
    total_cases: int
    per_factor: dict[str, FactorStat]
    unclassified: FactorStat


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    mean_days: float
    count: int


@dataclass(frozen=True)
class BottleneckReport:
    transitions: tuple[Transition, ...]
    thresholds_days: tuple[float, ...]
    pct_over: dict[float, float]


def self_loop_counts(log: EventLog) -> dict[str, int]:
    """Consecutive equal-activity pairs per activity, summed over all traces."""
    counts: dict[str, int] = {}
    for trace in to_sequential(log):
        for a, b in zip(trace.activities, trace.activities[1:]):
            if a == b:
                counts[a] = counts.get(a, 0) + 1
    return dict(sorted(counts.items()))


def back_forth_counts(log: EventLog) -> dict[tuple[str, str], int]:
    """Raw A->B->A triple counts keyed by (A, B), overlapping triples included."""
    counts: dict[tuple[str, str], int] = {}
    for trace in to_sequential(log):
        seq = trace.activities
        for i in range(len(seq) - 2):
            if seq[i] == seq[i + 2] and seq[i] != seq[i + 1]:
                key = (seq[i], seq[i + 1])
                counts[key] = counts.get(key, 0) + 1
    return counts


def back_forth(log: EventLog) -> dict[str, tuple[str, int]]:
    """Per activity, the partner it ping-pongs with most (ties: smallest code)."""
    best: dict[str, tuple[str, int]] = {}
    for (a, b), count in sorted(back_forth_counts(log).items()):
        if a not in best or count > best[a][1]:
            best[a] = (b, count)
    return dict(sorted(best.items()))


def loop_report(log: EventLog) -> LoopReport:
    return LoopReport(self_loops=self_loop_counts(log), back_forth=back_forth(log))


def reopen_analysis(log: EventLog, reopen_code: str = REOPEN_CODE) -> ReopenReport:
    """Classify each case's reopens by the nearest preceding resolution factor.

    A case counts once per factor no matter how many of its reopens trace
    back to it; reopens with no preceding factor land in the unclassified
    bucket. Percentages are over all cases in the log.
    """
    factor_set = set(REOPEN_FACTORS)
    traces = to_sequential(log)
    total = len(traces)
    case_hits: dict[str, int] = {factor: 0 for factor in REOPEN_FACTORS}
    unclassified_cases = 0
    for trace in traces:
        seq = trace.activities
        hit: set[str] = set()
        for i, activity in enumerate(seq):
            if activity != reopen_code:
                continue
            factor = None
            for j in range(i - 1, -1, -1):
                if seq[j] in factor_set:
                    factor = seq[j]
                    break
            hit.add(factor if factor is not None else UNCLASSIFIED)
        for factor in hit:
            if factor == UNCLASSIFIED:
                unclassified_cases += 1
            else:
                case_hits[factor] += 1

    def stat(cases: int) -> FactorStat:
        return FactorStat(cases, 100.0 * cases / total if total else 0.0)

    return ReopenReport(
        total_cases=total,
        per_factor={factor: stat(case_hits[factor]) for factor in REOPEN_FACTORS},
        unclassified=stat(unclassified_cases),
    )


def bottlenecks(
    model: ProcessModel,
    thresholds_days: Sequence[float] = DEFAULT_THRESHOLDS_DAYS,
) -> BottleneckReport:
    """Rank transitions by mean duration and flag the share over each threshold.

    ``pct_over`` is the percentage of distinct transitions whose mean
    exceeds the threshold.
    """
    transitions = sorted(
        (
            Transition(s, t, edge.mean_duration_s / SECONDS_PER_DAY, edge.frequency)
            for (s, t), edge in model.edges.items()
        ),
        key=lambda tr: (-tr.mean_days, tr.source, tr.target),
    )
    total = len(transitions)
    pct_over = {
        float(theta): (
            100.0 * sum(tr.mean_days > theta for tr in transitions) / total
            if total
            else 0.0
        )
        for theta in thresholds_days
    }
    return BottleneckReport(tuple(transitions), tuple(float(t) for t in thresholds_days), pct_over)


@dataclass(frozen=True)
class ComparisonTable:
    """Loop analysis side by side: main model column, then one per cluster."""

    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...] = field(default_factory=tuple)

    def render(self) -> str:
        widths = [
            max(len(self.headers[col]), *(len(row[col]) for row in self.rows))
            if self.rows
            else len(self.headers[col])
            for col in range(len(self.headers))
        ]
        lines = [
            " | ".join(h.ljust(w) for h, w in zip(self.headers, widths)).rstrip()
        ]
        lines.append("-+-".join("-" * w for w in widths))
        for row in self.rows:
            lines.append(
                " | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
            )
        return "\n".join(lines) + "\n"


def _loop_cell(report: LoopReport, activity: str) -> str:
    loops = report.self_loops.get(activity)
    partner = report.back_forth.get(activity)
    left = str(loops) if loops else "-"
    right = f"{partner[0]}/{partner[1]}" if partner else "-"
    return f"{left}, {right}"


def cluster_comparison(
    main_report: LoopReport, cluster_reports: Sequence[LoopReport]
) -> ComparisonTable:
    """One row per activity with a loop in any report; '-' marks absences."""
    reports = [main_report, *cluster_reports]
    activities = sorted(
        {a for r in reports for a in r.self_loops}
        | {a for r in reports for a in r.back_forth}
    )
    headers = ("Activity", "Main Model") + tuple(
        f"Cluster {i + 1}" for i in range(len(cluster_reports))
    )
    rows = tuple(
        (activity,) + tuple(_loop_cell(r, activity) for r in reports)
        for activity in activities
    )
    return ComparisonTable(headers, rows)


def loop_report_to_dict(report: LoopReport) -> dict:
    return {
        "self_loops": dict(report.self_loops),
        "back_forth": {
            a: {"partner": b, "count": n} for a, (b, n) in report.back_forth.items()
        },
    }


def reopen_report_to_dict(report: ReopenReport) -> dict:
    payload = {
        factor: {"cases": stat.cases, "percentage": stat.percentage}
        for factor, stat in report.per_factor.items()
    }
    payload[UNCLASSIFIED] = {
        "cases": report.unclassified.cases,
        "percentage": report.unclassified.percentage,
    }
    return {"total_cases": report.total_cases, "factors": payload}


def bottleneck_report_to_dict(report: BottleneckReport) -> dict:
    return {
        "transitions": [
            {
                "source": tr.source,
                "target": tr.target,
                "mean_days": tr.mean_days,
                "count": tr.count,
            }
            for tr in report.transitions
        ],
        "thresholds_days": list(report.thresholds_days),
        "pct_over": {str(theta): pct for theta, pct in report.pct_over.items()},
    }


def write_histogram_csv(
    rows: Sequence[tuple[str, str, float]], sink: TextIO
) -> None:
    """Histogram data as ``label,cluster,value`` rows for external plotting."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(HISTOGRAM_HEADER)
    for label, cluster, value in rows:
        writer.writerow((label, cluster, value))
