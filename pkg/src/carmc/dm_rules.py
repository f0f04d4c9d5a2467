"""Dynamic-model derivation: one state-transition diagram per class.

Each class gets the sub-diagram of the events that touch it (rule DM1), a
pre-creation state (DM2A), and then one transformation per event in
topological order: plain events add an '-ed' state and one transition per
precedent (DM2B), specialized events fan out into one state per variant
with conditioned transitions (DM3), and and-joined events unfold into a
lattice of auxiliary states tracking which precedents already occurred
(DM4). Transition labels prefer the transaction derived from the event,
then the end-of-editing service, then the edit or creation service.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations

from . import diagnostics as dg
from . import model as m
from . import objectmodel as om
from .diagnostics import DerivationError, DiagnosticSink
from .graph import EventGraph, sort_events, sub_diagram_for_class

PRE_CREATION = "pre_creation"
INTERMEDIATE = "intermediate"
AUXILIARY = "auxiliary"

PRE_CREATION_NAME = "Pre_creation"
DEFAULT_BLOCKED_MESSAGE = "This action cannot be executed"

# Which derived service labels the transition when an event produced several
# services on the class.
_KIND_PRIORITY = {
    om.END_OF_EDITING: 1,
    om.EDIT: 2,
    om.CREATION: 3,
    om.SHARED_INSERT: 4,
    om.SHARED_DELETE: 5,
}

_ARG_PATH = re.compile(r"\(([^()]+)\)$")


@dataclass
class State:
    name: str
    kind: str = INTERMEDIATE


@dataclass
class Transition:
    source: str
    target: str
    service: str
    condition: str | None = None
    agents: list[str] = field(default_factory=list)
    message: str = ""

    def label(self) -> str:
        return f"{self.service} when {self.condition}" if self.condition else self.service


@dataclass
class StateTransitionDiagram:
    class_name: str
    states: list[State] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)

    def state_names(self) -> set[str]:
        return {s.name for s in self.states}

    def state(self, name: str) -> State | None:
        for s in self.states:
            if s.name == name:
                return s
        return None

    def has_transition(self, source: str, target: str, service: str,
                       condition: str | None = None) -> bool:
        return any(t.source == source and t.target == target and t.service == service
                   and t.condition == condition for t in self.transitions)


def _scan_condition(condition: str, names: list[str]):
    """Yield (text, matched_name_or_None) chunks, longest names matched first."""
    ordered = sorted(names, key=len, reverse=True)
    i = 0
    while i < len(condition):
        matched = None
        for name in ordered:
            end = i + len(name)
            if condition[i:end] == name:
                before_ok = i == 0 or not condition[i - 1].isalnum()
                after_ok = end == len(condition) or not condition[end].isalnum()
                if before_ok and after_ok:
                    matched = name
                    break
        if matched:
            yield matched, matched
            i += len(matched)
        else:
            yield condition[i], None
            i += 1


def referenced_fields(condition: str, field_names: list[str]) -> list[str]:
    """Field names occurring in a condition, in occurrence order."""
    return [name for _, name in _scan_condition(condition, field_names) if name]


def substitute_fields(condition: str, mapping: dict[str, str]) -> str:
    """Replace message-structure field names with service argument names.

    Field names may contain spaces; longer names are matched first, and a
    match must end at a word boundary so fields prefixing other identifiers
    are left alone.
    """
    return "".join(mapping[name] if name else text
                   for text, name in _scan_condition(condition, list(mapping)))


class DynamicModelDeriver:
    def __init__(self, model: m.RequirementsModel, object_model: om.ObjectModel,
                 graph: EventGraph, trace: om.TraceMap, *,
                 self_loops: bool = False, sink: DiagnosticSink | None = None):
        self.model = model
        self.om = object_model
        self.graph = graph
        self.trace = trace
        self.self_loops = self_loops
        self.sink = sink or DiagnosticSink()
        self.events = model.event_map()

    def derive(self) -> list[StateTransitionDiagram]:
        return [self._derive_class(cls) for cls in self.om.classes]

    # -- per-class derivation ---------------------------------------------

    def _derive_class(self, cls: om.Class) -> StateTransitionDiagram:
        sub = sub_diagram_for_class(self.graph, self.trace, cls.name)
        dropped = [e for e in self.graph.loopbacks()
                   if e.source in sub.events and e.target in sub.events]
        if dropped:
            listed = ", ".join(f"{e.source} -> {e.target}" for e in dropped)
            self.sink.warn(dg.UNKNOWN_LOC, dg.LOOPBACK_DROPPED,
                           f"loopbacks dropped from the {cls.name} state diagram: {listed}")
        std = StateTransitionDiagram(cls.name, [State(PRE_CREATION_NAME, PRE_CREATION)])
        self.trace.add("DM2A", m.START, om.state_path(cls.name, PRE_CREATION_NAME))
        result_states: dict[str, list[str]] = {}
        for event_id in sort_events(sub):
            event = self.events[event_id]
            precedents = sub.predecessors(event_id)
            merge = sub.incoming_merge_kind(event_id)
            is_and_join = len(precedents) >= 2 and merge == m.AND_JOIN
            if event.variants:
                if is_and_join:
                    raise DerivationError(dg.error(event.loc, dg.AND_JOIN_VARIANT,
                                                   f"specialized event {event_id!r} with and-joined precedents is not supported"))
                self.transform_specialized(event, cls, std, precedents, result_states)
            elif is_and_join:
                self.transform_and_join(event, cls, std, precedents, result_states)
            else:
                self.transform_event(event, cls, std, precedents, result_states)
            if self.self_loops:
                self._add_self_loops(event, cls, std, result_states[event_id])
        return std

    # -- service selection ---------------------------------------------

    def _services_of_event(self, cls: om.Class, event_id: str) -> list[tuple[int, int, str]]:
        """(priority, insertion index, name) of the class services the event derived."""
        derived: set[str] = set()
        for link in self.trace.links:
            if om.TraceMap.source_event(link.source) != event_id:
                continue
            match = re.fullmatch(re.escape(cls.name) + r"\.([^.()\[\]]+)\(\)", link.derived)
            if match:
                derived.add(match.group(1))
        found: list[tuple[int, int, str]] = []
        for index, txn in enumerate(self.om.transactions_of(cls.name)):
            if txn.name in derived:
                found.append((0, index, txn.name))
        for index, service in enumerate(cls.services):
            if service.name in derived:
                found.append((_KIND_PRIORITY[service.kind], index, service.name))
        return sorted(found)

    def _service_for(self, cls: om.Class, event: m.CommunicativeEvent) -> str:
        services = self._services_of_event(cls, event.id)
        if not services:
            raise DerivationError(dg.error(event.loc, dg.NO_SERVICE,
                                           f"event {event.id!r} traces to no service of class {cls.name!r}"))
        return services[0][2]

    def _agents(self, event: m.CommunicativeEvent) -> list[str]:
        actor = event.interface_actor.strip()
        return [re.sub(r"\s+", "_", actor).upper()] if actor else []

    def _argument_map(self, event: m.CommunicativeEvent, cls: om.Class) -> dict[str, str]:
        """Field name -> derived argument name, for condition translation.

        Arguments on the transition's own class win; for events whose
        structure spans several classes, fields that derived an argument
        only elsewhere fall back to that name.
        """
        own: dict[str, str] = {}
        any_class: dict[str, str] = {}
        prefix = f"{event.id}/"
        for link in self.trace.links:
            if not link.source.startswith(prefix):
                continue
            match = _ARG_PATH.search(link.derived)
            if not match or match.group(1).startswith("p_this"):
                continue
            field_name = link.source.rsplit("/", 1)[-1]
            any_class.setdefault(field_name, match.group(1))
            if link.derived.startswith(cls.name + "."):
                own.setdefault(field_name, match.group(1))
        return {**any_class, **own}

    # -- event transformations -------------------------------------------

    def _source_states(self, precedents: list[str],
                       result_states: dict[str, list[str]]) -> list[str]:
        if not precedents:
            return [PRE_CREATION_NAME]
        sources: list[str] = []
        for p in precedents:
            if p not in result_states:
                raise DerivationError(dg.error(dg.UNKNOWN_LOC, dg.ORDERING,
                                               f"precedent {p!r} has no derived state yet"))
            sources.extend(s for s in result_states[p] if s not in sources)
        return sources

    def _new_state(self, std: StateTransitionDiagram, name: str, kind: str,
                   loc) -> State:
        if name in std.state_names():
            raise DerivationError(dg.error(loc, dg.STATE_COLLISION,
                                           f"state {name!r} already exists in the {std.class_name} state diagram"))
        state = State(name, kind)
        std.states.append(state)
        return state

    def transform_event(self, event, cls, std, precedents, result_states) -> None:
        name = event.id + "ed"
        self._new_state(std, name, INTERMEDIATE, event.loc)
        self.trace.add("DM2B", event.id, om.state_path(cls.name, name))
        service = self._service_for(cls, event)
        for source in self._source_states(precedents, result_states):
            std.transitions.append(Transition(source, name, service,
                                              agents=self._agents(event)))
            self.trace.add("DM2B", event.id,
                           om.transition_path(cls.name, source, name, service))
        result_states[event.id] = [name]

    def transform_specialized(self, event, cls, std, precedents, result_states) -> None:
        service = self._service_for(cls, event)
        mapping = self._argument_map(event, cls)
        field_names = [f.name for f in m.iter_all_fields(event.message_structure)]
        sources = self._source_states(precedents, result_states)
        states: list[str] = []
        for variant in event.variants:
            missing = [f for f in referenced_fields(variant.condition, field_names)
                       if f not in mapping]
            if missing:
                raise DerivationError(dg.error(variant.loc, dg.VARIANT_FIELD,
                                               f"variant {variant.id!r} condition references {missing[0]!r}, which derived no argument on class {cls.name!r}"))
            name = variant.id + "ed"
            self._new_state(std, name, INTERMEDIATE, variant.loc)
            variant_source = f"{event.id}/{variant.id}"
            self.trace.add("DM3", variant_source, om.state_path(cls.name, name))
            condition = substitute_fields(variant.condition, mapping)
            for source in sources:
                std.transitions.append(Transition(source, name, service, condition,
                                                  self._agents(event),
                                                  DEFAULT_BLOCKED_MESSAGE))
                self.trace.add("DM3", variant_source,
                               om.transition_path(cls.name, source, name, service))
            states.append(name)
        result_states[event.id] = states

    def transform_and_join(self, event, cls, std, precedents, result_states) -> None:
        joined = sorted(precedents)
        state_of: dict[str, str] = {}
        for p in joined:
            states = result_states.get(p, [])
            if len(states) != 1:
                raise DerivationError(dg.error(event.loc, dg.AND_JOIN_VARIANT,
                                               f"and-join precedent {p!r} must have exactly one derived state"))
            state_of[p] = states[0]
        roots = {t.source for t in std.transitions
                 if t.target in state_of.values()}
        if len(roots) != 1:
            raise DerivationError(dg.error(event.loc, dg.AND_JOIN_ROOT,
                                           f"and-join precedents of {event.id!r} do not share a single source state (found {sorted(roots)})"))
        root = roots.pop()

        def cell_state(occurred: tuple[str, ...]) -> str:
            if not occurred:
                return root
            if len(occurred) == 1:
                return state_of[occurred[0]]
            return "{" + ",".join(occurred) + "}"

        for size in range(2, len(joined) + 1):
            for subset in combinations(joined, size):
                name = cell_state(subset)
                if name in std.state_names():
                    continue
                std.states.append(State(name, AUXILIARY))
                self.trace.add("DM4", event.id, om.state_path(cls.name, name))
        for size in range(0, len(joined)):
            for subset in combinations(joined, size):
                for p in joined:
                    if p in subset:
                        continue
                    target = tuple(sorted(set(subset) | {p}))
                    source_name, target_name = cell_state(subset), cell_state(target)
                    service = self._service_for(cls, self.events[p])
                    if std.has_transition(source_name, target_name, service):
                        continue
                    std.transitions.append(Transition(source_name, target_name, service,
                                                      agents=self._agents(self.events[p])))
                    self.trace.add("DM4", event.id,
                                   om.transition_path(cls.name, source_name, target_name, service))
        final = event.id + "ed"
        self._new_state(std, final, INTERMEDIATE, event.loc)
        self.trace.add("DM4", event.id, om.state_path(cls.name, final))
        top = cell_state(tuple(joined))
        service = self._service_for(cls, event)
        std.transitions.append(Transition(top, final, service, agents=self._agents(event)))
        self.trace.add("DM4", event.id, om.transition_path(cls.name, top, final, service))
        result_states[event.id] = [final]

    def _add_self_loops(self, event, cls, std, states: list[str]) -> None:
        own = {s.name: s for s in cls.services}
        for _, _, name in self._services_of_event(cls, event.id):
            service = own.get(name)
            if service is None or service.kind not in (om.EDIT, om.SHARED_INSERT, om.SHARED_DELETE):
                continue
            for state in states:
                if std.has_transition(state, state, name):
                    continue
                std.transitions.append(Transition(state, state, name,
                                                  agents=self._agents(event)))
                self.trace.add("DM-SELF", event.id,
                               om.transition_path(cls.name, state, state, name))


def derive_dynamic_model(model: m.RequirementsModel, object_model: om.ObjectModel,
                         graph: EventGraph, trace: om.TraceMap, *,
                         self_loops: bool = False, strict: bool = False,
                         diagnostics: list | None = None) -> list[StateTransitionDiagram]:
    """One state-transition diagram per object-model class (rules DM1..DM4)."""
    sink = DiagnosticSink(strict)
    deriver = DynamicModelDeriver(model, object_model, graph, trace,
                                  self_loops=self_loops, sink=sink)
    stds = deriver.derive()
    sink.extend_into(diagnostics)
    return stds
