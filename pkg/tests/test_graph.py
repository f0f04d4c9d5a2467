from __future__ import annotations

from itertools import permutations

import pytest

from carmc import model as m
from carmc.diagnostics import DerivationError
from carmc.graph import Edge, build_graph, extend_diagram, sort_events, sub_diagram_for_class
from carmc.objectmodel import TraceMap


def graph_model(processes: dict[str, list[str]],
                precedences: list[tuple[str, str] | tuple[str, str, str, bool]]) -> m.RequirementsModel:
    """Requirements model with trivial events, for graph-only tests."""
    model = m.RequirementsModel()
    for pid, event_ids in processes.items():
        events = [m.CommunicativeEvent(eid, eid.lower(),
                                       message_structure=m.Aggregation(f"A {eid}", [m.DataField("n")]))
                  for eid in event_ids]
        model.processes.append(m.BusinessProcess(pid, events=events))
    target_process = model.processes[0]
    for entry in precedences:
        source, target = entry[0], entry[1]
        merge = entry[2] if len(entry) > 2 else m.PLAIN
        loop = entry[3] if len(entry) > 3 else False
        target_process.precedences.append(m.PrecedenceRelation(source, target, merge, loop))
    return model


def valid_orders(events: set[str], edges: list[tuple[str, str]]) -> list[list[str]]:
    """Brute-force oracle: all permutations that respect every edge."""
    orders = []
    for perm in permutations(sorted(events)):
        index = {e: i for i, e in enumerate(perm)}
        if all(index[a] < index[b] for a, b in edges):
            orders.append(list(perm))
    return orders


CHAIN_EDGES = [("B9", "B4"), ("B4", "A1"), ("A1", "A2"), ("B4", "A3"),
               ("A1", "A4"), ("A3", "A4"), ("A2", "C2")]


def chain_model() -> m.RequirementsModel:
    return graph_model({"A": ["A1", "A2", "A3", "A4"], "B": ["B4", "B9"], "C": ["C2"]},
                       CHAIN_EDGES)


def test_extension_pulls_transitive_precedents_only():
    graph = extend_diagram(chain_model(), "A")
    assert graph.events == {"A1", "A2", "A3", "A4", "B4", "B9"}
    assert "C2" not in graph.events
    pairs = {(e.source, e.target) for e in graph.edges}
    assert ("B9", "B4") in pairs and ("B4", "A1") in pairs
    assert (m.START, "B9") in pairs  # sole initial event
    assert not any(t == "C2" for _, t in pairs)


def test_extension_is_a_fixpoint():
    graph = extend_diagram(chain_model(), "A")
    model = chain_model()
    outside = {e.id for e in model.events()} - graph.events
    for p in model.precedences():
        if not p.is_loopback and p.target in graph.events:
            assert p.source not in outside


def test_closed_process_extends_to_itself():
    model = graph_model({"P": ["P1", "P2"]}, [("P1", "P2")])
    graph = extend_diagram(model, "P")
    assert graph.events == {"P1", "P2"}
    assert {(e.source, e.target) for e in graph.edges} == {("P1", "P2"), (m.START, "P1")}


def test_hospital_extension(hospital_model):
    graph = extend_diagram(hospital_model, "TREAT")
    assert graph.events == {"TREAT 1", "TREAT 2", "APP 1", "DIS 1", "NUR 1", "MED 1"}


def test_extension_unknown_precedence_endpoint():
    model = graph_model({"P": ["P1"]}, [("GHOST", "P1")])
    with pytest.raises(DerivationError) as err:
        extend_diagram(model, "P")
    assert err.value.diagnostic.code == "DANGLING"


def test_sort_is_a_valid_linear_extension_and_lexicographic_min():
    graph = extend_diagram(chain_model(), "A")
    order = sort_events(graph)
    edges = [(e.source, e.target) for e in graph.edges if e.source != m.START]
    oracle = valid_orders(set(graph.events), edges)
    assert order in oracle
    assert order == min(oracle)
    assert len(order) == len(graph.events)


def test_sort_small_poset_against_oracle():
    # B4 < A1, A1 < A4, A3 < A4; every other pair unordered.
    model = graph_model({"A": ["A1", "A3", "A4"], "B": ["B4"]},
                        [("B4", "A1"), ("A1", "A4"), ("A3", "A4")])
    graph = build_graph(model)
    order = sort_events(graph)
    oracle = valid_orders({"A1", "A3", "A4", "B4"},
                          [("B4", "A1"), ("A1", "A4"), ("A3", "A4")])
    assert order in oracle
    assert order == min(oracle) == ["A3", "B4", "A1", "A4"]


def test_sort_is_deterministic(hospital_model):
    graph = build_graph(hospital_model)
    assert sort_events(graph) == sort_events(graph)


def test_hospital_order_constraints(hospital_result):
    order = hospital_result.order
    position = {e: i for i, e in enumerate(order)}
    for before in ("NUR 1", "MED 1", "APP 1"):
        assert position[before] < position["TREAT 1"]
    assert position["DIS 1"] < position["TREAT 2"]
    assert position["TREAT 1"] < position["TREAT 2"]


def test_sort_removes_loopbacks_first():
    model = graph_model({"P": ["P1", "P2"]},
                        [("P1", "P2"), ("P2", "P1", m.PLAIN, True)])
    order = sort_events(build_graph(model))
    assert order == ["P1", "P2"]


def test_sort_reports_residual_cycle():
    model = graph_model({"P": ["P1", "P2"]}, [("P1", "P2"), ("P2", "P1")])
    with pytest.raises(DerivationError) as err:
        sort_events(build_graph(model))
    assert err.value.diagnostic.code == "CYCLE"
    assert "P 1" in err.value.diagnostic.message or "P1" in err.value.diagnostic.message


def chain_trace(mapping: dict[str, list[str]]) -> TraceMap:
    trace = TraceMap()
    for class_name, events in mapping.items():
        for event in events:
            trace.add("OM4", f"{event}/A {event}", class_name)
    return trace


def test_sub_diagram_splices_through_removed_events():
    model = graph_model({"P": ["I", "II", "III", "IV"]},
                        [("I", "II"), ("II", "III"), ("III", "IV")])
    graph = build_graph(model)
    trace = chain_trace({"C": ["II", "IV"], "D": ["I", "III"]})
    sub = sub_diagram_for_class(graph, trace, "C")
    assert sub.events == {"II", "IV"}
    pairs = {(e.source, e.target) for e in sub.edges}
    assert pairs == {("II", "IV"), (m.START, "II")}


def test_sub_diagram_identity_when_class_touches_everything():
    model = graph_model({"P": ["P1", "P2", "P3"]},
                        [("P1", "P2"), ("P2", "P3"), ("P3", "P1", m.PLAIN, True)])
    graph = build_graph(model)
    trace = chain_trace({"C": ["P1", "P2", "P3"]})
    sub = sub_diagram_for_class(graph, trace, "C")
    assert sub.events == graph.events
    pairs = {(e.source, e.target) for e in sub.edges}
    assert pairs == {("P1", "P2"), ("P2", "P3"), (m.START, "P1")}  # loopback dropped


def test_sub_diagram_node_set_matches_trace_exactly():
    model = graph_model({"P": ["P1", "P2", "P3"]}, [("P1", "P2"), ("P2", "P3")])
    trace = chain_trace({"C": ["P2"]})
    sub = sub_diagram_for_class(build_graph(model), trace, "C")
    assert sub.events == trace.events_touching_class("C")


def test_sub_diagram_unknown_class():
    model = graph_model({"P": ["P1"]}, [])
    with pytest.raises(DerivationError) as err:
        sub_diagram_for_class(build_graph(model), TraceMap(), "GHOST")
    assert err.value.diagnostic.code == "UNKNOWN-CLASS"


def test_hospital_medical_treatment_sub_diagram(hospital_result):
    sub = sub_diagram_for_class(hospital_result.graph, hospital_result.trace,
                                "MEDICAL_TREATMENT")
    assert sub.events == {"TREAT 1", "TREAT 2"}
    pairs = {(e.source, e.target) for e in sub.edges}
    assert pairs == {(m.START, "TREAT 1"), ("TREAT 1", "TREAT 2")}


def test_start_never_has_incoming_edges(hospital_result):
    for edge in hospital_result.graph.edges:
        assert edge.target != m.START


def test_edge_dataclass_orderable():
    edges = sorted([Edge("B", "C"), Edge("A", "B")], key=lambda e: (e.source, e.target))
    assert edges[0].source == "A"


def test_end_nodes_parsed_but_ignored():
    model = graph_model({"P": ["P1", "P2"]}, [("P1", "P2"), ("P2", m.END)])
    assert any(p.target == m.END for p in model.precedences())
    graph = build_graph(model)
    assert all(e.target != m.END for e in graph.edges)
    assert sort_events(graph) == ["P1", "P2"]
