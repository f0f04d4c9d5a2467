"""Object-model data types (classes, services, relationships) and the trace map."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import MANY, Cardinality  # noqa: F401  (re-exported for consumers)

CONSTANT = "constant"
VARIABLE = "variable"

DATA_TYPES = ("Nat", "Int", "Real", "Autonumeric", "String", "Text",
              "Time", "Date", "DateTime", "Bool", "Image", "Blob")

CREATION = "creation"
END_OF_EDITING = "end_of_editing"
EDIT = "edit"
SHARED_INSERT = "shared_insert"
SHARED_DELETE = "shared_delete"
SERVICE_KINDS = (CREATION, END_OF_EDITING, EDIT, SHARED_INSERT, SHARED_DELETE)

DATA_VALUED = "data_valued"
OBJECT_VALUED = "object_valued"

NESTING = "nesting"
REFERENCE = "reference"
EXTENSION = "extension"


@dataclass
class Attribute:
    name: str
    id: bool = False
    attr_type: str = VARIABLE
    data_type: str = "String"
    size: int | None = None
    requested: bool = True
    null_allowed: bool = True


@dataclass
class Argument:
    name: str
    kind: str = DATA_VALUED
    data_type: str | None = None   # data-valued arguments
    class_ref: str | None = None   # object-valued arguments
    size: int | None = None
    null_allowed: bool = True


@dataclass
class Service:
    name: str
    kind: str = CREATION
    arguments: list[Argument] = field(default_factory=list)
    agents: list[str] = field(default_factory=list)
    shared_with: str | None = None


@dataclass
class Class:
    name: str
    attributes: list[Attribute] = field(default_factory=list)
    services: list[Service] = field(default_factory=list)

    def attribute(self, name: str) -> Attribute | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def service(self, name: str) -> Service | None:
        for s in self.services:
            if s.name == name:
                return s
        return None

    def identifier(self) -> list[Attribute]:
        return [a for a in self.attributes if a.id]


@dataclass
class StructuralRelationship:
    class_a: str
    class_b: str
    card_a: Cardinality
    card_b: Cardinality
    origin: str = REFERENCE


@dataclass
class Transaction:
    name: str
    owner_class: str
    components: list[str] = field(default_factory=list)


@dataclass
class ObjectModel:
    classes: list[Class] = field(default_factory=list)
    relationships: list[StructuralRelationship] = field(default_factory=list)
    transactions: list[Transaction] = field(default_factory=list)

    def class_named(self, name: str) -> Class | None:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def class_names(self) -> set[str]:
        return {c.name for c in self.classes}

    def transactions_of(self, class_name: str) -> list[Transaction]:
        return [t for t in self.transactions if t.owner_class == class_name]


# --- derived-element path helpers (the vocabulary of trace links) ----------

def class_path(name: str) -> str:
    return name


def attribute_path(class_name: str, attr: str) -> str:
    return f"{class_name}.{attr}"


def service_path(class_name: str, service: str) -> str:
    return f"{class_name}.{service}()"


def argument_path(class_name: str, service: str, arg: str) -> str:
    return f"{class_name}.{service}({arg})"


def relationship_path(class_a: str, class_b: str) -> str:
    return f"{class_a}--{class_b}"


def state_path(class_name: str, state: str) -> str:
    return f"{class_name}.std[{state}]"


def transition_path(class_name: str, source: str, target: str, service: str) -> str:
    return f"{class_name}.std[{source} -> {target} @ {service}]"


@dataclass(frozen=True)
class TraceLink:
    rule: str
    source: str
    derived: str


@dataclass
class TraceMap:
    """Bidirectional links between requirements elements and derived ones.

    Source paths start with the owning event id (`TREAT 1/MEDICAL
    TREATMENT/Patient`), or START for pre-creation states. Derived paths use
    the helpers above. Every link carries the id of the rule that created
    the element.
    """

    links: list[TraceLink] = field(default_factory=list)

    def add(self, rule: str, source: str, derived: str) -> None:
        self.links.append(TraceLink(rule, source, derived))

    def sorted_links(self) -> list[TraceLink]:
        return sorted(self.links, key=lambda l: (l.rule, l.source, l.derived))

    @staticmethod
    def source_event(source: str) -> str | None:
        head = source.split("/", 1)[0]
        return None if head == "START" else head

    def events_touching_class(self, class_name: str) -> set[str]:
        """Events with an object-model link into the class (DM sub-diagram set)."""
        prefix = class_name + "."
        out: set[str] = set()
        for link in self.links:
            if ".std[" in link.derived:
                continue
            if link.derived == class_name or link.derived.startswith(prefix):
                event = self.source_event(link.source)
                if event is not None:
                    out.add(event)
        return out

    def links_for(self, path: str) -> list[TraceLink]:
        """Links whose source or derived path is `path` or nested under it."""
        def touches(candidate: str) -> bool:
            if candidate == path:
                return True
            if candidate.startswith(path):
                rest = candidate[len(path):]
                return rest[:1] in ("/", ".", "(", "[", "-")
            return False
        return [l for l in self.sorted_links() if touches(l.source) or touches(l.derived)]

    def derived_paths(self) -> set[str]:
        return {l.derived for l in self.links}
