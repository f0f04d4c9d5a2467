"""Model validation: every invariant violation becomes a diagnostic.

validate_model never raises; it reports every problem it can find, in a
stable order, so it also covers models built programmatically rather than
parsed. An empty list means the model is derivable.
"""

from __future__ import annotations

import re

from . import diagnostics as dg
from . import model as m

_CONDITION_KEYWORDS = {"and", "or", "not", "true", "false", "null"}
_CONDITION_PUNCT = re.compile(r"(<=|>=|!=|<>|[=<>()+\-*/,])")
_NUMBER = re.compile(r"^\d+(\.\d+)?$")
_QUOTED_SPAN = re.compile(r""""[^"]*"|'[^']*'""")

_FIELD_PROPS = {
    m.PROP_ATTRIBUTE_NAME, m.PROP_ATTRIBUTE_TYPE, m.PROP_DATA_TYPE,
    m.PROP_SIZE, m.PROP_NULL_ALLOWED, m.PROP_REQUESTED,
}
_RELATION_PROPS = {m.PROP_REFERENCED_CARD, m.PROP_REFERRER_CARD}
_AGG_PROPS = {m.PROP_CLASS_NAME, m.PROP_IDENTIFIER, m.PROP_CREATION_SERVICE_NAME,
              m.PROP_EDIT_SERVICE_NAME, m.PROP_TRANSACTION_NAME}


def unknown_condition_tokens(condition: str, field_names: list[str]) -> list[str]:
    """Words in a variant condition that are neither fields nor literals.

    Field names may contain spaces, so known fields are matched greedily,
    longest first, before falling back to single-word tokens.
    """
    names = sorted(field_names, key=len, reverse=True)
    stripped = _QUOTED_SPAN.sub(" ", condition)
    chunks = [c.strip() for c in _CONDITION_PUNCT.split(stripped) if c.strip()]
    unknown: list[str] = []
    for chunk in chunks:
        if _CONDITION_PUNCT.fullmatch(chunk) or _NUMBER.match(chunk):
            continue
        rest = chunk
        while rest:
            matched = False
            for name in names:
                if rest == name or rest.startswith(name + " "):
                    rest = rest[len(name):].strip()
                    matched = True
                    break
            if matched:
                continue
            word, _, rest = rest.partition(" ")
            rest = rest.strip()
            if word.lower() not in _CONDITION_KEYWORDS and not _NUMBER.match(word):
                unknown.append(word)
    return unknown


_nesting_chain = m.nesting_chain


class _Validator:
    def __init__(self, model: m.RequirementsModel):
        self.model = model
        self.out: list[dg.Diagnostic] = []

    def error(self, loc, code, message):
        self.out.append(dg.error(loc, code, message))

    def warning(self, loc, code, message):
        self.out.append(dg.warning(loc, code, message))

    def run(self) -> list[dg.Diagnostic]:
        self._check_events()
        self._check_precedences()
        self._check_cycles()
        self._check_messages()
        self._check_event_details()
        self._check_annotations()
        return dg.sort_diagnostics(self.out)

    def _check_events(self) -> None:
        seen: dict[str, m.SourceLocation] = {}
        for process in self.model.processes:
            for event in process.events:
                if event.id in (m.START, m.END):
                    self.error(event.loc, dg.RESERVED_ID,
                               f"{event.id!r} is reserved and cannot name an event")
                if not event.id.startswith(process.id):
                    self.error(event.loc, dg.PROCESS_PREFIX,
                               f"event id {event.id!r} does not carry the process prefix {process.id!r}")
                if event.id in seen:
                    self.error(event.loc, dg.DUP_EVENT,
                               f"duplicate event id {event.id!r} (first declared at {seen[event.id]})")
                else:
                    seen[event.id] = event.loc

    def _check_precedences(self) -> None:
        ids = {e.id for e in self.model.events()}
        incoming: dict[str, str] = {}
        for p in self.model.precedences():
            if p.source != m.START and p.source not in ids:
                self.error(p.loc, dg.DANGLING,
                           f"precedence source {p.source!r} names no event" if p.source != m.END
                           else "END cannot be a precedence source")
            if p.target != m.END and p.target not in ids:
                self.error(p.loc, dg.DANGLING,
                           f"precedence target {p.target!r} names no event" if p.target != m.START
                           else "START cannot be a precedence target")
            if p.target in ids:
                prior = incoming.get(p.target)
                if prior is not None and prior != p.merge_kind:
                    self.error(p.loc, dg.MIXED_MERGE,
                               f"event {p.target!r} mixes {prior} and {p.merge_kind} incoming precedences")
                incoming[p.target] = p.merge_kind

    def _check_cycles(self) -> None:
        ids = {e.id for e in self.model.events()}
        succ: dict[str, list[str]] = {i: [] for i in sorted(ids)}
        indeg = {i: 0 for i in ids}
        for p in self.model.precedences():
            if p.is_loopback or p.source not in ids or p.target not in ids:
                continue
            succ[p.source].append(p.target)
            indeg[p.target] += 1
        queue = sorted(i for i in ids if indeg[i] == 0)
        while queue:
            node = queue.pop()
            for nxt in succ[node]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    queue.append(nxt)
        residue = {i for i in ids if indeg[i] > 0}
        reported: set[frozenset] = set()
        locs = {e.id: e.loc for e in self.model.events()}
        for start in sorted(residue):
            component = self._cycle_from(start, succ, residue)
            if component and frozenset(component) not in reported:
                reported.add(frozenset(component))
                names = ", ".join(sorted(component))
                self.error(locs[min(component)], dg.CYCLE,
                           f"precedences of events {names} form a cycle with no loopback mark")

    @staticmethod
    def _cycle_from(start, succ, residue):
        path, on_path, seen = [], set(), set()
        node = start
        while node not in seen:
            seen.add(node)
            path.append(node)
            on_path.add(node)
            nexts = [n for n in succ[node] if n in residue]
            if not nexts:
                return None
            node = sorted(nexts)[0]
            if node in on_path:
                return path[path.index(node):]
        return None

    def _check_messages(self) -> None:
        declared = self.model.business_object_keys()
        for event in self.model.events():
            root = event.message_structure
            if not isinstance(root, m.Aggregation):
                self.error(event.loc, dg.ROOT_AGG,
                           f"event {event.id!r} message structure root must be an aggregation")
                continue
            for agg in m.iter_all_aggregations(root):
                names: dict[str, m.SourceLocation] = {}
                for member in agg.members:
                    if member.name in names:
                        self.error(member.loc, dg.MEMBER_DUP,
                                   f"aggregation {agg.name!r} has two members named {member.name!r}")
                    names[member.name] = member.loc
                marked = agg.marked_fields()
                if len(marked) > 1:
                    self.error(marked[1].loc, dg.DOUBLE_MARK,
                               f"aggregation {agg.name!r} marks {len(marked)} reference fields as extending a business object; only one is allowed")
            for field in m.iter_all_fields(root):
                if isinstance(field, m.ReferenceField):
                    if m.canonical_key(field.domain) not in declared:
                        self.error(field.loc, dg.UNKNOWN_OBJECT,
                                   f"reference field {field.name!r} names undeclared business object {field.domain!r}")
                if field.op not in m.KNOWN_OPS:
                    self.warning(field.loc, dg.OP_CODE,
                                 f"unknown op code {field.op!r} on field {field.name!r} is preserved as-is")

    def _check_event_details(self) -> None:
        for event in self.model.events():
            root = event.root_aggregation()
            if root is None:
                continue
            field_names = [f.name for f in m.iter_all_fields(root)]
            seen_variants: set[str] = set()
            for variant in event.variants:
                if not variant.condition.strip():
                    self.error(variant.loc, dg.VARIANT_EMPTY,
                               f"variant {variant.id!r} of event {event.id!r} has an empty condition")
                    continue
                if variant.id in seen_variants:
                    self.error(variant.loc, dg.VARIANT_DUP,
                               f"event {event.id!r} declares variant {variant.id!r} twice")
                seen_variants.add(variant.id)
                for token in unknown_condition_tokens(variant.condition, field_names):
                    self.error(variant.loc, dg.VARIANT_FIELD,
                               f"variant {variant.id!r} condition references unknown field {token!r}")
            for path in event.identifier_restriction:
                element = m.resolve_path(root, path)
                if not isinstance(element, m.DataField):
                    self.error(event.loc, dg.IDENT_FIELD,
                               f"identifier restriction of event {event.id!r} names {'/'.join(path)!r}, which is not a data field")
            for restriction in event.structural_restrictions:
                element = m.resolve_path(root, restriction.subject)
                subject = "/".join(restriction.subject)
                if isinstance(element, m.ReferenceField):
                    if restriction.referenced is not None and restriction.referenced.max != 1:
                        self.error(restriction.loc, dg.RESTRICTION_CONFLICT,
                                   f"restriction on reference field {subject!r} states max {restriction.referenced.max} on the referenced side; reference fields imply max 1")
                elif element is not None and _nesting_chain(root, restriction.subject):
                    _, _, iterated = _nesting_chain(root, restriction.subject)
                    required = m.MANY if iterated else 1
                    if restriction.referenced is not None and restriction.referenced.max != required:
                        self.error(restriction.loc, dg.RESTRICTION_CONFLICT,
                                   f"restriction on nesting {subject!r} states max {restriction.referenced.max} on the nested side; the structure implies max {required}")
                else:
                    self.error(restriction.loc, dg.RESTRICTION_FIELD,
                               f"restriction subject {subject!r} in event {event.id!r} is not a reference field or nested substructure")

    def _check_annotations(self) -> None:
        events = self.model.event_map()
        seen: dict[tuple, m.SourceLocation] = {}
        for entry in self.model.annotations.entries:
            key = (entry.path, entry.prop)
            if key in seen:
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"duplicate annotation {entry.prop!r} for {' / '.join(entry.path)!r}")
                continue
            seen[key] = entry.loc
            self._check_annotation(entry, events)

    def _check_annotation(self, entry: m.AnnotationEntry, events) -> None:
        target = " / ".join(entry.path)
        event = events.get(entry.path[0])
        if event is None:
            self.error(entry.loc, dg.ANNOTATION_TARGET,
                       f"annotation targets unknown event {entry.path[0]!r}")
            return
        root = event.root_aggregation()
        if root is None:
            return
        segments = entry.path[1:]
        element = m.resolve_path(root, segments) if segments else root
        if element is None:
            self.error(entry.loc, dg.ANNOTATION_TARGET,
                       f"annotation path {target!r} resolves to no message-structure element")
            return
        prop, value = entry.prop, entry.value
        if prop in _FIELD_PROPS:
            if not isinstance(element, m.DataField):
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"annotation {prop!r} on {target!r} applies to data fields only")
            elif prop == m.PROP_SIZE and (not value.isdigit() or int(value) <= 0):
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"annotation size on {target!r} must be a positive integer, got {value!r}")
            elif prop in (m.PROP_NULL_ALLOWED, m.PROP_REQUESTED) and value not in ("yes", "no"):
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"annotation {prop!r} on {target!r} must be yes or no, got {value!r}")
            elif prop == m.PROP_ATTRIBUTE_TYPE and value not in ("constant", "variable"):
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"annotation attribute-type on {target!r} must be constant or variable, got {value!r}")
        elif prop in _RELATION_PROPS:
            is_relation = isinstance(element, m.ReferenceField) or (
                segments and _nesting_chain(root, segments) is not None)
            if not is_relation:
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"annotation {prop!r} on {target!r} applies to reference fields or nested substructures")
            else:
                try:
                    m.Cardinality.parse(value)
                except ValueError as exc:
                    self.error(entry.loc, dg.ANNOTATION_TARGET, f"annotation on {target!r}: {exc}")
        elif prop in _AGG_PROPS:
            agg = element
            while isinstance(agg, m.Iteration):
                agg = agg.body
            if not isinstance(agg, m.Aggregation):
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"annotation {prop!r} on {target!r} applies to aggregation substructures")
                return
            if prop == m.PROP_IDENTIFIER:
                for name in (n.strip() for n in value.split(",")):
                    member = agg.member_named(name)
                    if not isinstance(member, m.DataField):
                        self.error(entry.loc, dg.ANNOTATION_TARGET,
                                   f"identifier annotation on {target!r} names {name!r}, which is not a data field of {agg.name!r}")
            if prop in (m.PROP_EDIT_SERVICE_NAME, m.PROP_TRANSACTION_NAME) and not agg.marked_fields():
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           f"annotation {prop!r} on {target!r} applies to aggregations that extend a business object")
        elif prop == m.PROP_END_OF_EDITING_NAME:
            if segments:
                self.error(entry.loc, dg.ANNOTATION_TARGET,
                           "end-of-editing-name annotations target the event itself, not a path inside it")


def validate_model(model: m.RequirementsModel) -> list[dg.Diagnostic]:
    """All invariant violations and cross-checks for a requirements model."""
    return _Validator(model).run()
