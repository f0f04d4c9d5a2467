"""Object-model derivation: one class-diagram view per event, folded in order.

Each communicative event's message structure is walked top-down. An
aggregation substructure with no marked reference field creates a class
(rules OM4..OM22); an aggregation whose reference field is marked as
extending a business object extends the class derived earlier for that
object (OM23..OM26). Views are integrated incrementally into one object
model, so events must arrive in a precedence-compatible order.
"""

from __future__ import annotations

import re

from . import diagnostics as dg
from . import model as m
from . import objectmodel as om
from .diagnostics import DerivationError, DiagnosticSink, SourceLocation, UNKNOWN_LOC

_TYPE_ROWS = {
    "number": ("Nat", "Int", "Real", "Autonumeric"),
    "text": ("String", "Text"),
    "date": ("Time", "Date", "DateTime"),
    "time": ("Time", "Date", "DateTime"),
    "money": ("Real",),
}
_TYPE_DEFAULTS = {"number": "Real", "text": "String", "date": "DateTime",
                  "time": "DateTime", "money": "Real"}
_ANNOTATION_ONLY_TYPES = ("Bool", "Image", "Blob")
DEFAULT_STRING_SIZE = 100


def normalize_class_name(name: str) -> str:
    return m.canonical_key(name)


def normalize_attr_name(name: str) -> str:
    return re.sub(r"\s+", "_", name.strip()).lower()


def normalize_actor(name: str) -> str:
    return re.sub(r"\s+", "_", name.strip()).upper()


def camel(class_name: str) -> str:
    return "".join(part.capitalize() for part in class_name.split("_") if part)


def event_id_camel(event_id: str) -> str:
    return "".join(part.capitalize() for part in event_id.split())


def slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", text.strip().lower()).strip("_")


def field_arg_name(field_name: str) -> str:
    return "p_agr" + re.sub(r"\s+", "_", field_name.strip())


def map_data_type(domain: str, op_code: str = "", data_type_choice: str | None = None,
                  size_choice: int | None = None, *, allow_autonumeric: bool = True,
                  loc: SourceLocation = UNKNOWN_LOC,
                  sink: DiagnosticSink | None = None) -> tuple[str, int | None]:
    """Pick an attribute data type (and size) for a data-field domain.

    The chosen annotation wins when it is legal for the domain's row;
    otherwise the row default applies, biased to Autonumeric for generated
    (`g`) number fields. String attributes need a size; without an
    annotation the default is 100 (an error in strict mode).
    """
    sink = sink or DiagnosticSink()
    row = _TYPE_ROWS.get(domain.strip().lower())
    if row is None:
        raise DerivationError(dg.error(loc, dg.DATA_TYPE, f"{domain!r} is not a basic field domain"))
    if data_type_choice:
        if data_type_choice not in row + _ANNOTATION_ONLY_TYPES:
            raise DerivationError(dg.error(
                loc, dg.DATA_TYPE,
                f"data type {data_type_choice!r} is not available for domain {domain!r} (allowed: {', '.join(row + _ANNOTATION_ONLY_TYPES)})"))
        data_type = data_type_choice
    elif domain.strip().lower() == "number" and op_code == "g" and allow_autonumeric:
        data_type = "Autonumeric"
    else:
        data_type = _TYPE_DEFAULTS[domain.strip().lower()]
    if data_type == "Autonumeric" and not allow_autonumeric:
        raise DerivationError(dg.error(loc, dg.DATA_TYPE,
                                       "Autonumeric is reserved for constant attributes and cannot be used on extension attributes"))
    size: int | None = None
    if data_type == "String":
        if size_choice is not None:
            size = size_choice
        else:
            sink.warn(loc, dg.SIZE_DEFAULT,
                      f"no size annotation for String attribute; defaulting to {DEFAULT_STRING_SIZE}",
                      strict_error=True)
            size = DEFAULT_STRING_SIZE
    elif size_choice is not None:
        sink.warn(loc, dg.ANNOTATION_IGNORED, f"size annotation ignored for data type {data_type}")
    return data_type, size


class ObjectModelDeriver:
    """Folds communicative events into an object model plus trace map."""

    def __init__(self, model: m.RequirementsModel, *, strict: bool = False,
                 sink: DiagnosticSink | None = None):
        self.model = model
        self.om = om.ObjectModel()
        self.trace = om.TraceMap()
        self.sink = sink or DiagnosticSink(strict)
        self.registry: dict[str, str] = {}       # business-object key -> class name
        self.creator_event: dict[str, str] = {}  # class name -> creating event id
        self._event_ann: dict[tuple[int, str], tuple[str, SourceLocation]] = {}

    # -- naming helpers ------------------------------------------------

    def _unique(self, base: str, taken: set[str], loc: SourceLocation, what: str) -> str:
        if base not in taken:
            return base
        n = 2
        while f"{base}_{n}" in taken:
            n += 1
        name = f"{base}_{n}"
        self.sink.warn(loc, dg.NAME_COLLISION, f"{what} name {base!r} is taken; using {name!r}")
        return name

    def _service_namespace(self, cls: om.Class) -> set[str]:
        names = {s.name for s in cls.services}
        names.update(t.name for t in self.om.transactions_of(cls.name))
        return names

    # -- annotation access ---------------------------------------------

    def _index_annotations(self, event: m.CommunicativeEvent) -> None:
        self._event_ann = {}
        root = event.root_aggregation()
        for entry in self.model.annotations.entries:
            if entry.path[0] != event.id or root is None:
                continue
            segments = entry.path[1:]
            element = m.resolve_path(root, segments) if segments else root
            while isinstance(element, m.Iteration):
                element = element.body
            if element is not None:
                self._event_ann[(id(element), entry.prop)] = (entry.value, entry.loc)

    def _ann(self, element, prop: str) -> str | None:
        found = self._event_ann.get((id(element), prop))
        return found[0] if found else None

    def _size_ann(self, element, loc: SourceLocation) -> int | None:
        value = self._ann(element, m.PROP_SIZE)
        if value is None:
            return None
        try:
            size = int(value)
        except ValueError:
            size = -1
        if size <= 0:
            raise DerivationError(dg.error(loc, dg.ANNOTATION_TARGET,
                                           f"size annotation must be a positive integer, got {value!r}"))
        return size

    # -- cardinality helpers --------------------------------------------

    def _restriction_for(self, event: m.CommunicativeEvent, element) -> m.CardinalityRestriction | None:
        root = event.root_aggregation()
        for r in event.structural_restrictions:
            resolved = m.resolve_path(root, r.subject)
            while isinstance(resolved, m.Iteration):
                resolved = resolved.body
            if resolved is element:
                return r
        return None

    def _side_card(self, restriction_card: m.Cardinality | None, ann_value: str | None,
                   default: m.Cardinality, loc: SourceLocation, what: str) -> m.Cardinality:
        if restriction_card is not None:
            return restriction_card
        if ann_value:
            try:
                return m.Cardinality.parse(ann_value)
            except ValueError as exc:
                raise DerivationError(dg.error(loc, dg.ANNOTATION_TARGET, str(exc))) from None
        self.sink.warn(loc, dg.CARD_DEFAULT,
                       f"no restriction or annotation for {what}; defaulting to {default}",
                       strict_error=True)
        return default

    # -- entry points ----------------------------------------------------

    def derive(self, order: list[str]) -> tuple[om.ObjectModel, om.TraceMap]:
        events = self.model.event_map()
        for event_id in order:
            event = events.get(event_id)
            if event is None:
                raise DerivationError(dg.error(UNKNOWN_LOC, dg.DANGLING,
                                               f"event order names unknown event {event_id!r}"))
            try:
                self.derive_event_view(event)
            except DerivationError as exc:
                d = exc.diagnostic
                raise DerivationError(dg.error(d.loc, d.code,
                                               f"while processing event {event_id!r}: {d.message}")) from None
        return self.om, self.trace

    def derive_event_view(self, event: m.CommunicativeEvent) -> None:
        root = event.root_aggregation()
        if root is None:
            raise DerivationError(dg.error(event.loc, dg.ROOT_AGG,
                                           f"event {event.id!r} has no aggregation message structure"))
        self._index_annotations(event)
        created: list[str] = []
        root_class, root_created = self._walk(event, root, None, False, (), created)
        if root_created and len(created) > 1:
            self._add_end_of_editing(event, root_class)

    # -- message-structure walk ------------------------------------------

    def _walk(self, event, structure, parent_class, iteration_between, rel_path, created):
        if isinstance(structure, m.Iteration):
            return self._walk(event, structure.body, parent_class, True,
                              rel_path + (structure.body.name,), created)
        agg: m.Aggregation = structure
        marked = agg.marked_fields()
        if len(marked) > 1:
            raise DerivationError(dg.error(marked[1].loc, dg.DOUBLE_MARK,
                                           f"aggregation {agg.name!r} marks more than one reference field"))
        if marked:
            cls_name = self.extend_class_view(event, agg, parent_class, iteration_between, rel_path)
            was_created = False
        else:
            cls_name = self.create_class_view(event, agg, parent_class, iteration_between, rel_path)
            created.append(cls_name)
            was_created = True
        for member in agg.substructures():
            self._walk(event, member, cls_name, False, rel_path + (member.name,), created)
        return cls_name, was_created

    def _source(self, event: m.CommunicativeEvent, rel_path: tuple[str, ...],
                *extra: str) -> str:
        root = event.root_aggregation()
        return "/".join((event.id, root.name) + rel_path + extra)

    # -- class creation (OM4..OM22) ---------------------------------------

    def create_class_view(self, event, agg, parent_class, iteration_between, rel_path) -> str:
        source = self._source(event, rel_path)
        base = self._ann(agg, m.PROP_CLASS_NAME) or normalize_class_name(agg.name)
        cls_name = self._unique(base, self.om.class_names(), agg.loc, "class")
        cls = om.Class(cls_name)
        self.om.classes.append(cls)
        self.creator_event[cls_name] = event.id
        self.trace.add("OM4", source, om.class_path(cls_name))
        key = m.canonical_key(agg.name)
        if key in self.registry:
            self.sink.warn(agg.loc, dg.NAME_COLLISION,
                           f"business object {agg.name!r} already maps to class {self.registry[key]!r}; keeping the first mapping")
        else:
            self.registry[key] = cls_name

        attr_names: set[str] = set()
        attr_of: dict[int, om.Attribute] = {}
        for field in agg.data_fields():
            base = self._ann(field, m.PROP_ATTRIBUTE_NAME) or normalize_attr_name(field.name)
            name = self._unique(base, attr_names, field.loc, "attribute")
            attr_names.add(name)
            attr = om.Attribute(name)
            cls.attributes.append(attr)
            attr_of[id(field)] = attr
            self.trace.add("OM6", self._source(event, rel_path, field.name),
                           om.attribute_path(cls_name, name))

        id_attrs = self._select_identifier(event, agg, cls, rel_path, attr_of, attr_names, source)

        for field in agg.data_fields():
            attr = attr_of[id(field)]
            ann_type = self._ann(field, m.PROP_ATTRIBUTE_TYPE)
            attr.attr_type = om.CONSTANT if attr.id else (ann_type or om.VARIABLE)
            if attr.id and ann_type == om.VARIABLE:
                self.sink.warn(field.loc, dg.ANNOTATION_IGNORED,
                               f"identifier attribute {attr.name!r} stays constant; annotation ignored")
            attr.data_type, attr.size = map_data_type(
                field.domain, field.op, self._ann(field, m.PROP_DATA_TYPE),
                self._size_ann(field, field.loc), loc=field.loc, sink=self.sink)
            if attr.data_type == "Autonumeric" and attr.attr_type != om.CONSTANT:
                attr.attr_type = om.CONSTANT
                self.sink.warn(field.loc, dg.ANNOTATION_IGNORED,
                               f"Autonumeric attribute {attr.name!r} forced to constant")
            attr.requested = True
            if self._ann(field, m.PROP_REQUESTED):
                self.sink.warn(field.loc, dg.REQUESTED_IGNORED,
                               f"requested override on {attr.name!r} ignored; attributes of a new class are always requested")
            null_ann = self._ann(field, m.PROP_NULL_ALLOWED)
            attr.null_allowed = False if attr.id else (null_ann != "no" if null_ann else True)

        if parent_class is not None:
            self._add_nesting(event, agg, parent_class, cls_name, iteration_between, rel_path)

        referenced_min: dict[int, int] = {}
        for field in agg.reference_fields():
            referenced_min[id(field)] = self._add_reference(event, agg, cls_name, field, rel_path)

        self._add_creation_service(event, agg, cls, rel_path, attr_of, referenced_min)
        return cls_name

    def _select_identifier(self, event, agg, cls, rel_path, attr_of, attr_names, source):
        chosen: list[om.Attribute] = []
        root = event.root_aggregation()
        for path in event.identifier_restriction:
            field = m.resolve_path(root, path)
            if field is None:
                raise DerivationError(dg.error(event.loc, dg.IDENT_FIELD,
                                               f"identifier restriction names nonexistent field {'/'.join(path)!r}"))
            if isinstance(field, m.DataField) and id(field) in attr_of:
                chosen.append(attr_of[id(field)])
        if not chosen:
            ann = self._ann(agg, m.PROP_IDENTIFIER)
            if ann:
                for name in (n.strip() for n in ann.split(",")):
                    member = agg.member_named(name)
                    if isinstance(member, m.DataField) and id(member) in attr_of:
                        chosen.append(attr_of[id(member)])
        if chosen:
            for attr in chosen:
                attr.id = True
        else:
            name = self._unique(cls.name.lower() + "_id", attr_names, agg.loc, "attribute")
            attr_names.add(name)
            attr = om.Attribute(name, id=True, attr_type=om.CONSTANT, data_type="Autonumeric",
                                size=None, requested=True, null_allowed=False)
            cls.attributes.insert(0, attr)
            self.trace.add("OM8", source, om.attribute_path(cls.name, name))
            chosen = [attr]
        return chosen

    def _add_nesting(self, event, agg, parent_class, cls_name, iteration_between, rel_path):
        restriction = self._restriction_for(event, agg)
        loc = agg.loc
        nested_max = m.MANY if iteration_between else 1
        nested = self._side_card(restriction.referenced if restriction else None,
                                 self._ann(agg, m.PROP_REFERENCED_CARD),
                                 m.Cardinality(0, nested_max), loc,
                                 f"the {cls_name} side of nesting {parent_class}--{cls_name}")
        nested = m.Cardinality(nested.min, nested_max)
        parent = self._side_card(restriction.referrer if restriction else None,
                                 self._ann(agg, m.PROP_REFERRER_CARD),
                                 m.Cardinality(0, m.MANY), loc,
                                 f"the {parent_class} side of nesting {parent_class}--{cls_name}")
        self.om.relationships.append(om.StructuralRelationship(
            parent_class, cls_name, parent, nested, om.NESTING))
        self.trace.add("OM13", self._source(event, rel_path),
                       om.relationship_path(parent_class, cls_name))

    def _resolve_reference(self, field: m.ReferenceField, code: str, problem: str) -> str:
        target = self.registry.get(m.canonical_key(field.domain))
        if target is None:
            raise DerivationError(dg.error(field.loc, code,
                                           f"reference field {field.name!r} targets business object {field.domain!r}, {problem}"))
        return target

    def _add_reference(self, event, agg, cls_name, field, rel_path) -> int:
        target = self._resolve_reference(
            field, dg.INCOMPLETE,
            "whose class has not been derived yet; the requirements model is incomplete or misordered")
        restriction = self._restriction_for(event, field)
        referenced = self._side_card(restriction.referenced if restriction else None,
                                     self._ann(field, m.PROP_REFERENCED_CARD),
                                     m.Cardinality(1, 1), field.loc,
                                     f"the {target} side of {cls_name}--{target}")
        referenced = m.Cardinality(referenced.min, 1)
        referrer = self._side_card(restriction.referrer if restriction else None,
                                   self._ann(field, m.PROP_REFERRER_CARD),
                                   m.Cardinality(0, m.MANY), field.loc,
                                   f"the {cls_name} side of {cls_name}--{target}")
        self.om.relationships.append(om.StructuralRelationship(
            cls_name, target, referrer, referenced, om.REFERENCE))
        self.trace.add("OM16", self._source(event, rel_path, field.name),
                       om.relationship_path(cls_name, target))
        return referenced.min

    def _add_creation_service(self, event, agg, cls, rel_path, attr_of, referenced_min):
        base = self._ann(agg, m.PROP_CREATION_SERVICE_NAME) or f"new_{cls.name.lower()}"
        name = self._unique(base, self._service_namespace(cls), agg.loc, "service")
        service = om.Service(name, om.CREATION, agents=self._agents(event))
        cls.services.append(service)
        self.trace.add("OM18", self._source(event, rel_path), om.service_path(cls.name, name))
        taken: set[str] = set()
        for field in agg.data_fields():
            attr = attr_of[id(field)]
            arg_name = self._unique("p_atr" + attr.name, taken, field.loc, "argument")
            taken.add(arg_name)
            service.arguments.append(om.Argument(arg_name, om.DATA_VALUED,
                                                 data_type=attr.data_type, size=attr.size,
                                                 null_allowed=attr.null_allowed))
            self.trace.add("OM19", self._source(event, rel_path, field.name),
                           om.argument_path(cls.name, name, arg_name))
        for field in agg.reference_fields():
            if field.extends_business_object:
                continue
            target = self.registry.get(m.canonical_key(field.domain))
            arg_name = self._unique(field_arg_name(field.name), taken, field.loc, "argument")
            taken.add(arg_name)
            service.arguments.append(om.Argument(arg_name, om.OBJECT_VALUED, class_ref=target,
                                                 null_allowed=referenced_min[id(field)] == 0))
            self.trace.add("OM20", self._source(event, rel_path, field.name),
                           om.argument_path(cls.name, name, arg_name))

    def _agents(self, event) -> list[str]:
        return [normalize_actor(event.interface_actor)] if event.interface_actor.strip() else []

    def _self_argument(self, cls_name: str) -> om.Argument:
        return om.Argument("p_this" + camel(cls_name), om.OBJECT_VALUED,
                           class_ref=cls_name, null_allowed=False)

    def _default_event_service_name(self, event) -> str:
        s = slug(event.name)
        return event_id_camel(event.id) + (("_" + s) if s else "")

    def _add_end_of_editing(self, event, root_class: str) -> None:
        cls = self.om.class_named(root_class)
        ann = self.model.annotations.get((event.id,), m.PROP_END_OF_EDITING_NAME)
        base = ann or self._default_event_service_name(event)
        name = self._unique(base, self._service_namespace(cls), event.loc, "service")
        service = om.Service(name, om.END_OF_EDITING,
                             arguments=[self._self_argument(root_class)],
                             agents=self._agents(event))
        cls.services.append(service)
        root = event.root_aggregation()
        self.trace.add("OM21", self._source(event, ()), om.service_path(root_class, name))
        self.trace.add("OM22", self._source(event, ()),
                       om.argument_path(root_class, name, service.arguments[0].name))

    # -- class extension (OM23..OM26) --------------------------------------

    def extend_class_view(self, event, agg, parent_class, iteration_between, rel_path) -> str:
        marked = agg.marked_fields()[0]
        target_name = self._resolve_reference(
            marked, dg.ORDERING,
            "whose class is untraceable; the precedence relationships are invalid or the event order is wrong")
        cls = self.om.class_named(target_name)
        self.trace.add("OM23", self._source(event, rel_path, marked.name),
                       om.class_path(target_name))

        if parent_class is not None:
            self._add_nesting(event, agg, parent_class, target_name, iteration_between, rel_path)

        attr_names = {a.name for a in cls.attributes}
        new_attrs: list[tuple[m.DataField, om.Attribute]] = []
        for field in agg.data_fields():
            base = self._ann(field, m.PROP_ATTRIBUTE_NAME) or normalize_attr_name(field.name)
            name = self._unique(base, attr_names, field.loc, "attribute")
            attr_names.add(name)
            data_type, size = map_data_type(
                field.domain, field.op, self._ann(field, m.PROP_DATA_TYPE),
                self._size_ann(field, field.loc), allow_autonumeric=False,
                loc=field.loc, sink=self.sink)
            attr = om.Attribute(name, id=False, attr_type=om.VARIABLE, data_type=data_type,
                                size=size, requested=False, null_allowed=True)
            if self._ann(field, m.PROP_REQUESTED) or self._ann(field, m.PROP_NULL_ALLOWED) \
                    or self._ann(field, m.PROP_ATTRIBUTE_TYPE):
                self.sink.warn(field.loc, dg.REQUESTED_IGNORED,
                               f"extension attribute {name!r} is always variable, not requested, and nullable; overrides ignored")
            cls.attributes.append(attr)
            new_attrs.append((field, attr))
            self.trace.add("OM24", self._source(event, rel_path, field.name),
                           om.attribute_path(target_name, name))

        new_partners: list[tuple[m.ReferenceField, str]] = []
        for field in agg.reference_fields():
            if field.extends_business_object:
                continue
            other = self._resolve_reference(
                field, dg.INCOMPLETE,
                "whose class has not been derived yet; the requirements model is incomplete or misordered")
            restriction = self._restriction_for(event, field)
            referrer = self._side_card(restriction.referrer if restriction else None,
                                       self._ann(field, m.PROP_REFERRER_CARD),
                                       m.Cardinality(0, m.MANY), field.loc,
                                       f"the {target_name} side of {target_name}--{other}")
            self.om.relationships.append(om.StructuralRelationship(
                target_name, other, referrer, m.Cardinality(0, 1), om.EXTENSION))
            self.trace.add("OM23", self._source(event, rel_path, field.name),
                           om.relationship_path(target_name, other))
            new_partners.append((field, other))

        components: list[str] = []
        if new_attrs:
            components.append(self._add_edit_service(event, agg, cls, rel_path, new_attrs))
        for field, other in new_partners:
            ins, _ = self._add_shared_pair(event, agg, cls, other, rel_path, field)
            components.append(ins)
        if len(components) >= 2:
            self._add_transaction(event, agg, cls, rel_path, components)
        return target_name

    def _add_edit_service(self, event, agg, cls, rel_path, new_attrs) -> str:
        if len(new_attrs) == 1:
            base = "set_" + new_attrs[0][1].name
        else:
            base = self._ann(agg, m.PROP_EDIT_SERVICE_NAME)
            if not base:
                base = "set_" + "_".join(attr.name for _, attr in new_attrs)
                self.sink.warn(agg.loc, dg.SERVICE_NAME_DEFAULT,
                               f"no edit-service-name annotation for the extension of {cls.name!r}; defaulting to {base!r}",
                               strict_error=True)
        name = self._unique(base, self._service_namespace(cls), agg.loc, "service")
        service = om.Service(name, om.EDIT, arguments=[self._self_argument(cls.name)],
                             agents=self._agents(event))
        cls.services.append(service)
        self.trace.add("OM25", self._source(event, rel_path), om.service_path(cls.name, name))
        self.trace.add("OM22", self._source(event, rel_path),
                       om.argument_path(cls.name, name, service.arguments[0].name))
        taken = {service.arguments[0].name}
        for field, attr in new_attrs:
            arg_name = self._unique("p_atr" + attr.name, taken, field.loc, "argument")
            taken.add(arg_name)
            service.arguments.append(om.Argument(arg_name, om.DATA_VALUED,
                                                 data_type=attr.data_type, size=attr.size,
                                                 null_allowed=attr.null_allowed))
            self.trace.add("OM25", self._source(event, rel_path, field.name),
                           om.argument_path(cls.name, name, arg_name))
        return name

    def _add_shared_pair(self, event, agg, cls, other_name, rel_path,
                         field: m.ReferenceField) -> tuple[str, str]:
        other = self.om.class_named(other_name)
        names = []
        for prefix in ("ins_", "del_"):
            base = prefix + other_name.lower()
            taken = self._service_namespace(cls) | self._service_namespace(other)
            names.append(self._unique(base, taken, agg.loc, "shared service"))
        field_source = self._source(event, rel_path, field.name)
        sides = ((cls, other),) if other is cls else ((cls, other), (other, cls))
        for name, kind in zip(names, (om.SHARED_INSERT, om.SHARED_DELETE)):
            for owner, partner in sides:
                service = om.Service(name, kind, shared_with=partner.name,
                                     agents=self._agents(event))
                service.arguments = [
                    self._self_argument(owner.name),
                    om.Argument("p_agr" + camel(partner.name), om.OBJECT_VALUED,
                                class_ref=partner.name, null_allowed=False),
                ]
                owner.services.append(service)
                self.trace.add("OM25", field_source, om.service_path(owner.name, name))
                self.trace.add("OM22", field_source,
                               om.argument_path(owner.name, name, service.arguments[0].name))
                self.trace.add("OM25", field_source,
                               om.argument_path(owner.name, name, service.arguments[1].name))
        return names[0], names[1]

    def _add_transaction(self, event, agg, cls, rel_path, components) -> None:
        base = self._ann(agg, m.PROP_TRANSACTION_NAME) or self._default_event_service_name(event)
        name = self._unique(base, self._service_namespace(cls), agg.loc, "transaction")
        self.om.transactions.append(om.Transaction(name, cls.name, list(components)))
        self.trace.add("OM26", self._source(event, rel_path), om.service_path(cls.name, name))


def derive_object_model(model: m.RequirementsModel, order: list[str], *, strict: bool = False,
                        diagnostics: list | None = None) -> tuple[om.ObjectModel, om.TraceMap]:
    """Fold every event of `order` into one object model (rules OM4..OM26)."""
    sink = DiagnosticSink(strict)
    deriver = ObjectModelDeriver(model, sink=sink)
    result = deriver.derive(order)
    sink.extend_into(diagnostics)
    return result
