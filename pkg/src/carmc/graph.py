"""Graph operations over communicative event diagrams.

Events and precedence relations form a directed graph with a synthetic START
node. Extension closes a process over its transitive precedent events; the
sort is Kahn's algorithm with a lexicographic tie-break so results are
reproducible; sub-diagrams restrict the graph to the events that touch one
class, splicing precedences through removed events so reachability survives.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from . import model as m
from .diagnostics import (
    CYCLE,
    DANGLING,
    UNKNOWN_CLASS,
    UNKNOWN_LOC,
    DerivationError,
    error,
)


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    merge_kind: str = m.PLAIN
    is_loopback: bool = False


@dataclass(frozen=True)
class EventGraph:
    events: frozenset[str]
    edges: frozenset[Edge]

    @property
    def nodes(self) -> frozenset[str]:
        return self.events | {m.START}

    def sorted_events(self) -> list[str]:
        return sorted(self.events)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: (e.source, e.target, e.merge_kind, e.is_loopback))

    def predecessors(self, event: str, include_loopbacks: bool = False) -> list[str]:
        return sorted({e.source for e in self.edges
                       if e.target == event and e.source != m.START
                       and (include_loopbacks or not e.is_loopback)})

    def incoming_merge_kind(self, event: str) -> str:
        kinds = {e.merge_kind for e in self.edges
                 if e.target == event and e.source != m.START and not e.is_loopback}
        return kinds.pop() if len(kinds) == 1 else m.PLAIN

    def loopbacks(self) -> list[Edge]:
        return [e for e in self.sorted_edges() if e.is_loopback]


def _attach_start(events: set[str], edges: set[Edge]) -> frozenset[Edge]:
    """Add START edges for every event with no non-loopback precedent."""
    out = {e for e in edges if e.source != m.START or e.target in events}
    has_precedent = {e.target for e in out if e.source != m.START and not e.is_loopback}
    for event in events - has_precedent:
        out.add(Edge(m.START, event))
    return frozenset(out)


def build_graph(model: m.RequirementsModel, event_ids: set[str] | None = None) -> EventGraph:
    """Event graph over the whole model (or a subset of its events)."""
    known = {e.id for e in model.events()}
    events = set(known if event_ids is None else (event_ids & known))
    edges: set[Edge] = set()
    for p in model.precedences():
        if p.target == m.END:
            continue
        if p.source == m.START:
            if p.target in events:
                edges.add(Edge(m.START, p.target))
            continue
        if p.source in events and p.target in events:
            edges.add(Edge(p.source, p.target, p.merge_kind, p.is_loopback))
    return EventGraph(frozenset(events), _attach_start(events, edges))


def extend_diagram(model: m.RequirementsModel, root_process: str) -> EventGraph:
    """Close a process over every event that transitively precedes it.

    Events that merely follow the process stay out. Loopback relations do
    not drive inclusion; they are kept as edges when both endpoints end up
    included.
    """
    process = model.process_by_id(root_process)
    if process is None:
        raise DerivationError(error(UNKNOWN_LOC, DANGLING, f"unknown process {root_process!r}"))
    known = {e.id for e in model.events()}
    for p in model.precedences():
        for endpoint in (p.source, p.target):
            if endpoint not in known and endpoint not in (m.START, m.END):
                raise DerivationError(error(p.loc, DANGLING,
                                            f"precedence endpoint {endpoint!r} names no event in the model"))
    included = {e.id for e in process.events}
    changed = True
    while changed:
        changed = False
        for p in model.precedences():
            if p.is_loopback or p.source in (m.START,) or p.target in (m.END,):
                continue
            if p.target in included and p.source not in included:
                included.add(p.source)
                changed = True
    return build_graph(model, included)


def sort_events(graph: EventGraph) -> list[str]:
    """One linear extension of the precedence partial order.

    Kahn's algorithm over the non-loopback edges; ties broken by ascending
    lexicographic event id, so the result is the lexicographically smallest
    valid order and is identical across runs.
    """
    succ: dict[str, list[str]] = {e: [] for e in graph.sorted_events()}
    indeg: dict[str, int] = {e: 0 for e in graph.events}
    for edge in graph.sorted_edges():
        if edge.is_loopback or edge.source == m.START:
            continue
        succ[edge.source].append(edge.target)
        indeg[edge.target] += 1
    ready = [e for e in graph.sorted_events() if indeg[e] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        event = heapq.heappop(ready)
        order.append(event)
        for nxt in succ[event]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(graph.events):
        residue = sorted(e for e in graph.events if indeg[e] > 0)
        raise DerivationError(error(UNKNOWN_LOC, CYCLE,
                                    "cannot order events; residual cycle over " + ", ".join(residue)))
    return order


def sub_diagram_for_class(graph: EventGraph, trace, class_name: str) -> EventGraph:
    """Restrict the graph to the events with a trace link into one class.

    Precedences through removed events are spliced so the surviving events
    keep their relative order; loopbacks are dropped; START is re-attached
    to the events that end up with no precedent.
    """
    keep = set(trace.events_touching_class(class_name)) & graph.events
    if not keep:
        raise DerivationError(error(UNKNOWN_LOC, UNKNOWN_CLASS,
                                    f"no event traces to class {class_name!r}"))
    succ: dict[str, set[str]] = {e: set() for e in graph.events}
    for edge in graph.edges:
        if edge.is_loopback or edge.source == m.START:
            continue
        succ[edge.source].add(edge.target)
    merge_of = {e: graph.incoming_merge_kind(e) for e in keep}
    edges: set[Edge] = set()
    for source in keep:
        stack = list(succ[source])
        visited: set[str] = set()
        while stack:
            node = stack.pop()
            if node in visited:
                continue
            visited.add(node)
            if node in keep:
                edges.add(Edge(source, node, merge_of[node]))
            else:
                stack.extend(succ[node])
    return EventGraph(frozenset(keep), _attach_start(keep, edges))
