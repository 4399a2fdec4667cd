"""Discovery tests: DFG content, resolutions, durations, XML/DOT exports."""

from __future__ import annotations

import io
from datetime import timedelta

import pytest

from bugmine.discovery import (
    DotOptions,
    ModelXmlError,
    annotate_durations,
    discover_model,
    export_dot,
    export_model_xml,
    import_model_xml,
)
from bugmine.ingest import EventLog
from bugmine.metrics import fitness

from conftest import HOUR, T0, log_from_sequences, random_log, simple_model

DAY = 24 * HOUR


class TestDiscoverModel:
    def test_exact_counts_at_full_resolution(self):
        log = log_from_sequences([("1", "AB"), ("2", "AB")])
        model = discover_model(log)
        assert model.nodes == {"A": 2, "B": 2}
        assert {pair: e.frequency for pair, e in model.edges.items()} == {("A", "B"): 2}
        assert model.start_edges == {"A": 2}
        assert model.end_edges == {"B": 2}

    def test_path_resolution_drops_rare_edge(self):
        sequences = [(str(i), "AB") for i in range(1, 10)] + [("10", "AC")]
        log = log_from_sequences(sequences)
        model = discover_model(log, 100.0, 50.0)
        assert ("A", "B") in model.edges
        assert ("A", "C") not in model.edges
        assert "C" not in model.nodes

    def test_own_log_replays_at_full_resolution(self, rng):
        for _ in range(10):
            log = random_log(rng)
            xml = export_model_xml(discover_model(log))
            assert fitness(xml, log) == 1.0

    def test_start_end_frequencies_sum_to_case_count(self, rng):
        for _ in range(10):
            log = random_log(rng)
            model = discover_model(log)
            cases = len(log.case_ids())
            assert sum(model.start_edges.values()) == cases
            assert sum(model.end_edges.values()) == cases

    def test_node_frequencies_sum_to_event_count(self, rng):
        for _ in range(10):
            log = random_log(rng)
            model = discover_model(log)
            assert sum(model.nodes.values()) == len(log)

    def test_lowering_path_resolution_never_adds_edges(self, rng):
        log = random_log(rng, max_cases=10, max_len=8)
        previous = None
        for pct in (100.0, 75.0, 50.0, 25.0, 5.0):
            edges = set(discover_model(log, 100.0, pct).edges)
            if previous is not None:
                assert edges <= previous
            previous = edges

    def test_activity_resolution_keeps_top_nodes(self):
        log = log_from_sequences([("1", ["A", "B", "A", "B", "A", "C"])])
        # ceil(66% of 3 distinct activities) = 2: C (frequency 1) is dropped
        # and the trace is re-stitched over A and B.
        model = discover_model(log, 66.0, 100.0)
        assert set(model.nodes) == {"A", "B"}
        assert model.nodes["A"] == 3

    def test_empty_log_rejected(self):
        with pytest.raises(ValueError):
            discover_model(EventLog([]))

    def test_bad_resolution_rejected(self):
        log = log_from_sequences([("1", "AB")])
        with pytest.raises(ValueError):
            discover_model(log, 0.0, 100.0)
        with pytest.raises(ValueError):
            discover_model(log, 100.0, 101.0)


def _ab_log(gaps_days):
    """One two-event case per gap: A at T0, B after the given number of days."""
    from bugmine.ingest import Event

    events = []
    for i, gap in enumerate(gaps_days):
        case = str(i + 1)
        events.append(Event(case, T0, "A", len(events)))
        events.append(Event(case, T0 + timedelta(days=gap), "B", len(events)))
    return EventLog(events)


class TestAnnotateDurations:
    def test_mean_of_two_gaps(self):
        model = annotate_durations(discover_model(_ab_log([400, 800])), _ab_log([400, 800]))
        assert model.edges[("A", "B")].mean_duration_s == pytest.approx(600 * DAY)

    def test_single_zero_gap(self):
        log = _ab_log([0])
        model = annotate_durations(discover_model(log), log)
        assert model.edges[("A", "B")].mean_duration_s == 0.0

    def test_three_gaps_average(self):
        log = _ab_log([1, 2, 6])
        model = annotate_durations(discover_model(log), log)
        assert model.edges[("A", "B")].mean_duration_s == pytest.approx(3 * DAY)


class TestModelXml:
    def test_round_trip_preserves_everything(self):
        log = log_from_sequences([("1", "ABCB"), ("2", "AC")])
        model = annotate_durations(discover_model(log), log)
        xml = export_model_xml(model)
        back = import_model_xml(xml)
        assert back == model
        assert export_model_xml(back) == xml

    def test_adjacency_for_fitness(self):
        log = log_from_sequences([("1", "AB")])
        model = import_model_xml(export_model_xml(discover_model(log)))
        assert model.adjacency() == {"A": {"B"}, "B": set()}

    def test_undeclared_edge_endpoint_is_decode_error(self):
        xml = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            "<model>"
            '<node id="0" code="A" frequency="1" />'
            '<edge source="A" target="Z" frequency="1" mean_duration_s="0.000000" />'
            "</model>"
        )
        with pytest.raises(ModelXmlError, match=r"model/edge\[1\].*'Z'"):
            import_model_xml(xml)

    def test_missing_attribute_names_path(self):
        xml = "<model><node id='0' code='A' /></model>"
        with pytest.raises(ModelXmlError, match=r"model/node\[1\]"):
            import_model_xml(xml)

    def test_malformed_xml_rejected(self):
        with pytest.raises(ModelXmlError):
            import_model_xml("<model><node")

    def test_accepts_stream_input(self):
        log = log_from_sequences([("1", "AB")])
        xml = export_model_xml(discover_model(log))
        assert import_model_xml(io.StringIO(xml)).nodes == {"A": 1, "B": 1}

    def test_many_nodes_round_trip(self):
        # One case visiting 81 activities in a chain.
        codes = [f"{chr(65 + i // 26)}{chr(65 + i % 26)}X" for i in range(81)]
        log = log_from_sequences([("1", codes)])
        model = import_model_xml(export_model_xml(discover_model(log)))
        assert len(model.adjacency()) == 81


class TestExportDot:
    def test_single_node_has_start_and_end(self):
        log = log_from_sequences([("1", "A")])
        dot = export_dot(discover_model(log))
        assert '"__start__" [shape=triangle' in dot
        assert '"__end__" [shape=doublecircle' in dot
        assert '"A" [shape=box' in dot
        assert '"__start__" -> "A" [style=dashed' in dot

    def test_penwidth_endpoints_of_linear_scale(self):
        model = simple_model({("A", "B"): 1, ("B", "C"): 10})
        dot = export_dot(model, DotOptions(min_penwidth=1.0, max_penwidth=5.0))
        assert 'penwidth=1.00' in dot
        assert 'penwidth=5.00' in dot

    def test_deterministic_output(self, rng):
        log = random_log(rng)
        model = annotate_durations(discover_model(log), log)
        assert export_dot(model) == export_dot(model)
        assert export_model_xml(model) == export_model_xml(model)

    def test_duration_labels_optional(self):
        log = log_from_sequences([("1", "AB")], step_s=2 * DAY)
        model = annotate_durations(discover_model(log), log)
        assert "2.0d" not in export_dot(model)
        assert "2.0d" in export_dot(model, DotOptions(include_durations=True))
