"""Directly-follows process model discovery with resolution thresholds.

The model is a directed graph of activity nodes annotated with absolute
frequencies; edges carry the observed directly-follows frequency and the
mean transition duration. Artificial start/end markers record which
activities open and close cases (rendered as dashed transitions).

Resolution thresholds keep the top fraction of activities (by node
frequency) and of transitions (by edge frequency); filtered views re-stitch
traces over the retained activities and prune nodes that lose their path
from start to end. At 100/100 the model contains exactly the observed
activities and directly-follows pairs.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from typing import Iterable, TextIO

from .ingest import EventLog, Trace, to_sequential

SECONDS_PER_DAY = 86_400.0


class ModelXmlError(ValueError):
    """Model XML violates the schema; message carries the element path."""


@dataclass(frozen=True)
class Edge:
    frequency: int
    mean_duration_s: float = 0.0


@dataclass
class ProcessModel:
    """Frequency- and duration-annotated directly-follows graph."""

    nodes: dict[str, int] = field(default_factory=dict)
    edges: dict[tuple[str, str], Edge] = field(default_factory=dict)
    start_edges: dict[str, int] = field(default_factory=dict)
    end_edges: dict[str, int] = field(default_factory=dict)

    def adjacency(self) -> dict[str, set[str]]:
        """Successor map over activity nodes; start/end markers excluded."""
        adj: dict[str, set[str]] = {code: set() for code in self.nodes}
        for source, target in self.edges:
            adj[source].add(target)
        return adj

    def node_count(self, include_endpoints: bool = True) -> int:
        return len(self.nodes) + (2 if include_endpoints else 0)

    def edge_count(self, include_endpoints: bool = True) -> int:
        n = len(self.edges)
        if include_endpoints:
            n += len(self.start_edges) + len(self.end_edges)
        return n


def _top_fraction(weights: dict, percent: float) -> set:
    """Keys of the ``ceil(percent% * len)`` heaviest entries, ties by key."""
    keep = math.ceil(percent / 100.0 * len(weights))
    ranked = sorted(weights.items(), key=lambda item: (-item[1], item[0]))
    return {key for key, _ in ranked[:keep]}


def _stitched(traces: Iterable[Trace], kept: set[str]) -> list[list[str]]:
    out = []
    for trace in traces:
        seq = [a for a in trace.activities if a in kept]
        if seq:
            out.append(seq)
    return out


def _reachable(seeds: set[str], adj: dict[str, set[str]]) -> set[str]:
    seen = set(seeds)
    frontier = list(seeds)
    while frontier:
        node = frontier.pop()
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def discover_model(
    log: EventLog, activity_resolution: float = 100.0, path_resolution: float = 100.0
) -> ProcessModel:
    """Mine the directly-follows model of ``log`` at the given resolutions.

    Resolutions are percentages in (0, 100]. Activity filtering applies
    before edges are counted; path filtering then keeps the most frequent
    transitions and prunes activities left without a start-to-end path.
    """
    if not log.events:
        raise ValueError("cannot discover a model from an empty log")
    for name, value in (("activity", activity_resolution), ("path", path_resolution)):
        if not 0.0 < value <= 100.0:
            raise ValueError(f"{name} resolution must be in (0, 100], got {value}")

    frequencies: dict[str, int] = {}
    for ev in log.events:
        frequencies[ev.activity] = frequencies.get(ev.activity, 0) + 1
    kept_nodes = _top_fraction(frequencies, activity_resolution)

    sequences = _stitched(to_sequential(log), kept_nodes)
    if not sequences:
        raise ValueError("activity resolution filtered out every trace")

    pair_counts: dict[tuple[str, str], int] = {}
    start_counts: dict[str, int] = {}
    end_counts: dict[str, int] = {}
    for seq in sequences:
        start_counts[seq[0]] = start_counts.get(seq[0], 0) + 1
        end_counts[seq[-1]] = end_counts.get(seq[-1], 0) + 1
        for a, b in zip(seq, seq[1:]):
            pair_counts[(a, b)] = pair_counts.get((a, b), 0) + 1

    kept_pairs = _top_fraction(pair_counts, path_resolution) if pair_counts else set()

    adj: dict[str, set[str]] = {}
    radj: dict[str, set[str]] = {}
    for a, b in kept_pairs:
        adj.setdefault(a, set()).add(b)
        radj.setdefault(b, set()).add(a)
    from_start = _reachable(set(start_counts), adj)
    to_end = _reachable(set(end_counts), radj)
    alive = from_start & to_end

    return ProcessModel(
        nodes={code: frequencies[code] for code in sorted(alive)},
        edges={
            pair: Edge(pair_counts[pair])
            for pair in sorted(kept_pairs)
            if pair[0] in alive and pair[1] in alive
        },
        start_edges={a: n for a, n in sorted(start_counts.items()) if a in alive},
        end_edges={a: n for a, n in sorted(end_counts.items()) if a in alive},
    )


def annotate_durations(model: ProcessModel, log: EventLog) -> ProcessModel:
    """Fill each edge's mean transition duration (seconds) from the log.

    The mean runs over every occurrence of the directly-follows pair in the
    traces re-stitched to the model's activity set, so it matches the edge
    frequencies of a model discovered from the same log.
    """
    sums: dict[tuple[str, str], float] = {}
    counts: dict[tuple[str, str], int] = {}
    kept = set(model.nodes)
    for trace in to_sequential(log):
        steps = [
            (a, ts) for a, ts in zip(trace.activities, trace.timestamps) if a in kept
        ]
        for (a, ts_a), (b, ts_b) in zip(steps, steps[1:]):
            pair = (a, b)
            sums[pair] = sums.get(pair, 0.0) + (ts_b - ts_a).total_seconds()
            counts[pair] = counts.get(pair, 0) + 1
    edges = {}
    for pair, edge in model.edges.items():
        if pair in counts:
            edges[pair] = replace(edge, mean_duration_s=sums[pair] / counts[pair])
        else:
            edges[pair] = edge
    return replace(model, edges=edges)


def export_model_xml(model: ProcessModel) -> str:
    """Serialize the model; deterministic (sorted) emission, UTF-8 text."""
    root = ET.Element("model")
    for index, code in enumerate(sorted(model.nodes)):
        ET.SubElement(
            root,
            "node",
            {"id": str(index), "code": code, "frequency": str(model.nodes[code])},
        )
    for source, target in sorted(model.edges):
        edge = model.edges[(source, target)]
        ET.SubElement(
            root,
            "edge",
            {
                "source": source,
                "target": target,
                "frequency": str(edge.frequency),
                "mean_duration_s": f"{edge.mean_duration_s:.6f}",
            },
        )
    for code in sorted(model.start_edges):
        ET.SubElement(
            root, "start", {"activity": code, "frequency": str(model.start_edges[code])}
        )
    for code in sorted(model.end_edges):
        ET.SubElement(
            root, "end", {"activity": code, "frequency": str(model.end_edges[code])}
        )
    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def _require(element: ET.Element, attr: str, path: str) -> str:
    value = element.get(attr)
    if value is None:
        raise ModelXmlError(f"{path}: missing attribute {attr!r}")
    return value


def _require_int(element: ET.Element, attr: str, path: str) -> int:
    raw = _require(element, attr, path)
    try:
        return int(raw)
    except ValueError:
        raise ModelXmlError(f"{path}: attribute {attr!r} is not an integer") from None


def import_model_xml(source: str | TextIO) -> ProcessModel:
    """Parse model XML back into a ProcessModel; raises ModelXmlError."""
    text = source if isinstance(source, str) else source.read()
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ModelXmlError(f"model: not well-formed ({exc})") from None
    if root.tag != "model":
        raise ModelXmlError(f"{root.tag}: expected root element 'model'")

    model = ProcessModel()
    counters = {"node": 0, "edge": 0, "start": 0, "end": 0}
    for child in root:
        if child.tag not in counters:
            raise ModelXmlError(f"model/{child.tag}: unknown element")
        counters[child.tag] += 1
        path = f"model/{child.tag}[{counters[child.tag]}]"
        if child.tag == "node":
            code = _require(child, "code", path)
            if code in model.nodes:
                raise ModelXmlError(f"{path}: duplicate node {code!r}")
            model.nodes[code] = _require_int(child, "frequency", path)
        elif child.tag == "edge":
            source_code = _require(child, "source", path)
            target_code = _require(child, "target", path)
            for code in (source_code, target_code):
                if code not in model.nodes:
                    raise ModelXmlError(f"{path}: undeclared node {code!r}")
            raw = _require(child, "mean_duration_s", path)
            try:
                mean = float(raw)
            except ValueError:
                raise ModelXmlError(f"{path}: bad mean_duration_s {raw!r}") from None
            model.edges[(source_code, target_code)] = Edge(
                _require_int(child, "frequency", path), mean
            )
        else:
            code = _require(child, "activity", path)
            if code not in model.nodes:
                raise ModelXmlError(f"{path}: undeclared node {code!r}")
            bucket = model.start_edges if child.tag == "start" else model.end_edges
            bucket[code] = _require_int(child, "frequency", path)
    return model


@dataclass(frozen=True)
class DotOptions:
    min_penwidth: float = 1.0
    max_penwidth: float = 5.0
    light_gray: int = 95
    dark_gray: int = 40
    include_durations: bool = False


def _scaler(values: Iterable[int]) -> "dict[int, float]":
    values = list(values)
    lo, hi = (min(values), max(values)) if values else (0, 0)
    span = hi - lo
    return {v: (v - lo) / span if span else 0.0 for v in set(values)}


def export_dot(model: ProcessModel, options: DotOptions = DotOptions()) -> str:
    """Render the model as a Graphviz digraph.

    Node fill darkness and edge penwidth scale linearly with frequency;
    start (triangle) and end (doublecircle) markers attach with dashed edges.
    Output is byte-stable for a given model.
    """
    node_t = _scaler(model.nodes.values())
    edge_t = _scaler(edge.frequency for edge in model.edges.values())

    def gray(freq: int) -> str:
        level = options.light_gray - (options.light_gray - options.dark_gray) * node_t[freq]
        return f"gray{round(level)}"

    def penwidth(freq: int) -> str:
        width = options.min_penwidth + (
            options.max_penwidth - options.min_penwidth
        ) * edge_t[freq]
        return f"{width:.2f}"

    lines = ["digraph process_model {", "  rankdir=TB;"]
    lines.append('  "__start__" [shape=triangle, label="start"];')
    lines.append('  "__end__" [shape=doublecircle, label="end"];')
    for code in sorted(model.nodes):
        freq = model.nodes[code]
        lines.append(
            f'  "{code}" [shape=box, style=filled, fillcolor="{gray(freq)}", '
            f'label="{code}\\n{freq}"];'
        )
    for source, target in sorted(model.edges):
        edge = model.edges[(source, target)]
        label = str(edge.frequency)
        if options.include_durations:
            label += f"\\n{edge.mean_duration_s / SECONDS_PER_DAY:.1f}d"
        lines.append(
            f'  "{source}" -> "{target}" [label="{label}", '
            f"penwidth={penwidth(edge.frequency)}];"
        )
    for code in sorted(model.start_edges):
        lines.append(
            f'  "__start__" -> "{code}" [style=dashed, label="{model.start_edges[code]}"];'
        )
    for code in sorted(model.end_edges):
        lines.append(
            f'  "{code}" -> "__end__" [style=dashed, label="{model.end_edges[code]}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
