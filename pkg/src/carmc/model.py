"""Data types for parsed requirements models (.carm files).

Source locations never participate in equality, so two parses of the same
text compare equal regardless of file names or formatting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .diagnostics import UNKNOWN_LOC, SourceLocation

START = "START"
END = "END"

PLAIN = "plain"
OR_MERGE = "or_merge"
AND_JOIN = "and_join"
MERGE_KINDS = (PLAIN, OR_MERGE, AND_JOIN)

BASIC_DOMAINS = ("number", "text", "date", "time", "money")
KNOWN_OPS = ("", "g", "i")

MANY = "M"

# Annotation properties understood by the derivation.
PROP_CLASS_NAME = "class-name"
PROP_ATTRIBUTE_NAME = "attribute-name"
PROP_IDENTIFIER = "identifier"
PROP_ATTRIBUTE_TYPE = "attribute-type"
PROP_DATA_TYPE = "data-type"
PROP_SIZE = "size"
PROP_NULL_ALLOWED = "null-allowed"
PROP_REQUESTED = "requested"
PROP_REFERENCED_CARD = "referenced-cardinality"
PROP_REFERRER_CARD = "referrer-cardinality"
PROP_CREATION_SERVICE_NAME = "creation-service-name"
PROP_EDIT_SERVICE_NAME = "edit-service-name"
PROP_END_OF_EDITING_NAME = "end-of-editing-name"
PROP_TRANSACTION_NAME = "transaction-name"

ANNOTATION_PROPS = (
    PROP_CLASS_NAME,
    PROP_ATTRIBUTE_NAME,
    PROP_IDENTIFIER,
    PROP_ATTRIBUTE_TYPE,
    PROP_DATA_TYPE,
    PROP_SIZE,
    PROP_NULL_ALLOWED,
    PROP_REQUESTED,
    PROP_REFERENCED_CARD,
    PROP_REFERRER_CARD,
    PROP_CREATION_SERVICE_NAME,
    PROP_EDIT_SERVICE_NAME,
    PROP_END_OF_EDITING_NAME,
    PROP_TRANSACTION_NAME,
)


def canonical_key(name: str) -> str:
    """Normalize a business-object / aggregation name for matching."""
    return re.sub(r"\s+", "_", name.strip()).upper()


def is_basic_domain(domain: str) -> bool:
    return domain.strip().lower() in BASIC_DOMAINS


@dataclass(frozen=True)
class Cardinality:
    min: int
    max: Union[int, str]  # 1 or MANY

    def __post_init__(self) -> None:
        if self.min not in (0, 1) or self.max not in (1, MANY):
            raise ValueError(f"illegal cardinality {self.min}:{self.max}")

    def __str__(self) -> str:
        return f"{self.min}:{self.max}"

    @classmethod
    def parse(cls, text: str) -> "Cardinality":
        m = re.fullmatch(r"([01])\s*:\s*(1|M)", text.strip())
        if not m:
            raise ValueError(f"expected cardinality 'min:max' with min 0|1, max 1|M, got {text!r}")
        return cls(int(m.group(1)), MANY if m.group(2) == "M" else 1)


@dataclass
class DataField:
    name: str
    op: str = ""
    domain: str = "text"
    example: str = ""
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


@dataclass
class ReferenceField:
    name: str
    op: str = ""
    domain: str = ""
    example: str = ""
    extends_business_object: bool = False
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


Field_ = Union[DataField, ReferenceField]


@dataclass
class Aggregation:
    name: str
    members: list  # of Field_ | Aggregation | Iteration
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)

    def data_fields(self) -> list[DataField]:
        return [m for m in self.members if isinstance(m, DataField)]

    def reference_fields(self) -> list[ReferenceField]:
        return [m for m in self.members if isinstance(m, ReferenceField)]

    def marked_fields(self) -> list[ReferenceField]:
        return [f for f in self.reference_fields() if f.extends_business_object]

    def substructures(self) -> list["Substructure"]:
        return [m for m in self.members if isinstance(m, (Aggregation, Iteration))]

    def member_named(self, name: str):
        for m in self.members:
            if m.name == name:
                return m
        return None


@dataclass
class Iteration:
    name: str
    body: "Substructure"
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


Substructure = Union[Aggregation, Iteration]


@dataclass
class CardinalityRestriction:
    subject: tuple[str, ...]  # path relative to the root aggregation
    referenced: Cardinality | None = None
    referrer: Cardinality | None = None
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


@dataclass
class EventVariant:
    id: str
    condition: str
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


@dataclass
class PrecedenceRelation:
    source: str  # event id or START
    target: str  # event id or END
    merge_kind: str = PLAIN
    is_loopback: bool = False
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


@dataclass
class CommunicativeEvent:
    id: str
    name: str
    primary_actor: str = ""
    interface_actor: str = ""
    message_structure: Substructure | None = None
    structural_restrictions: list[CardinalityRestriction] = field(default_factory=list)
    identifier_restriction: list[tuple[str, ...]] = field(default_factory=list)
    variants: list[EventVariant] = field(default_factory=list)
    goals: str = ""
    description: str = ""
    linked_communications: str = ""
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)

    def root_aggregation(self) -> Aggregation | None:
        if isinstance(self.message_structure, Aggregation):
            return self.message_structure
        return None


@dataclass
class BusinessProcess:
    id: str
    name: str = ""
    events: list[CommunicativeEvent] = field(default_factory=list)
    precedences: list[PrecedenceRelation] = field(default_factory=list)
    has_start_node: bool = False
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


@dataclass
class AnnotationEntry:
    path: tuple[str, ...]  # (event id, *segments relative to the root aggregation)
    prop: str
    value: str
    loc: SourceLocation = field(default=UNKNOWN_LOC, compare=False, repr=False)


@dataclass
class AnnotationSet:
    entries: list[AnnotationEntry] = field(default_factory=list)

    def get(self, path: tuple[str, ...], prop: str) -> str | None:
        found = None
        for e in self.entries:
            if e.path == path and e.prop == prop:
                found = e.value
        return found

    def merge(self, other: "AnnotationSet") -> None:
        self.entries.extend(other.entries)


@dataclass
class RequirementsModel:
    processes: list[BusinessProcess] = field(default_factory=list)
    business_objects: list[str] = field(default_factory=list)
    annotations: AnnotationSet = field(default_factory=AnnotationSet)

    def events(self) -> Iterator[CommunicativeEvent]:
        for p in self.processes:
            yield from p.events

    def event_map(self) -> dict[str, CommunicativeEvent]:
        out: dict[str, CommunicativeEvent] = {}
        for e in self.events():
            out.setdefault(e.id, e)
        return out

    def precedences(self) -> Iterator[PrecedenceRelation]:
        for p in self.processes:
            yield from p.precedences

    def process_by_id(self, process_id: str) -> BusinessProcess | None:
        for p in self.processes:
            if p.id == process_id:
                return p
        return None

    def business_object_keys(self) -> set[str]:
        return {canonical_key(b) for b in self.business_objects}

    def merge(self, other: "RequirementsModel") -> None:
        self.processes.extend(other.processes)
        known = self.business_object_keys()
        for b in other.business_objects:
            if canonical_key(b) not in known:
                self.business_objects.append(b)
                known.add(canonical_key(b))
        self.annotations.merge(other.annotations)


def resolve_path(root: Aggregation, segments: tuple[str, ...]):
    """Resolve a root-relative path to a field or substructure, or None."""
    current: Substructure | Field_ = root
    for seg in segments:
        if isinstance(current, Aggregation):
            nxt = current.member_named(seg)
        elif isinstance(current, Iteration):
            nxt = current.body if current.body.name == seg else None
        else:
            return None
        if nxt is None:
            return None
        current = nxt
    return current


def nesting_chain(root: Aggregation, segments: tuple[str, ...]):
    """Resolve a path to a nested substructure, normalized to its aggregation.

    Returns (parent_aggregation, aggregation, iteration_between) or None.
    iteration_between is true when an iteration sits between the parent
    aggregation and the resolved one.
    """
    if not segments:
        return None
    current: object = root
    last_agg = None
    iteration_between = False
    for seg in segments:
        if isinstance(current, Aggregation):
            last_agg = current
            iteration_between = False
            nxt = current.member_named(seg)
        elif isinstance(current, Iteration):
            nxt = current.body if current.body.name == seg else None
        else:
            return None
        if nxt is None:
            return None
        if isinstance(nxt, Iteration):
            iteration_between = True
        current = nxt
    while isinstance(current, Iteration):
        iteration_between = True
        current = current.body
    if not isinstance(current, Aggregation) or last_agg is None:
        return None
    return last_agg, current, iteration_between


def iter_all_fields(structure: Substructure | None) -> Iterator[Field_]:
    """All fields of a message structure, document order, nested included."""
    if structure is None:
        return
    if isinstance(structure, Aggregation):
        for m in structure.members:
            if isinstance(m, (Aggregation, Iteration)):
                yield from iter_all_fields(m)
            else:
                yield m
    else:
        yield from iter_all_fields(structure.body)


def iter_all_aggregations(structure: Substructure | None) -> Iterator[Aggregation]:
    if structure is None:
        return
    if isinstance(structure, Aggregation):
        yield structure
        for m in structure.substructures():
            yield from iter_all_aggregations(m)
    else:
        yield from iter_all_aggregations(structure.body)
