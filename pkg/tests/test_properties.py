"""Property suite over generated random models.

Every model must round-trip through the text format, derive
deterministically, and satisfy the structural invariants of the derivation
rules. The same checks back the acceptance suite.
"""

from __future__ import annotations

import pytest

from carmc import model as m
from carmc import objectmodel as om
from carmc import pipeline
from carmc.diagnostics import ERROR
from carmc.emit import render_classes_dot, render_model_json, render_std_dot, render_trace_tsv
from carmc.parser import parse_model, print_model
from carmc.validate import validate_model

from randmodel import random_model

N_MODELS = 200


def render_everything(result) -> str:
    parts = [render_model_json(result.object_model), render_trace_tsv(result.trace)]
    dot = render_classes_dot(result.object_model)
    if dot:
        parts.append(dot)
    parts.extend(render_std_dot(std) for std in result.stds)
    return "\n".join(parts)


def check_round_trip(model) -> None:
    text = print_model(model)
    assert parse_model(text) == model


def check_validates_without_errors(model) -> None:
    errors = [d for d in validate_model(model) if d.severity == ERROR]
    assert errors == [], errors


def check_deterministic(model):
    first = pipeline.derive(model)
    second = pipeline.derive(model)
    assert render_everything(first) == render_everything(second)
    return first


def creating_event(trace: om.TraceMap, derived: str, rules: tuple[str, ...]) -> str:
    links = [l for l in trace.links if l.derived == derived and l.rule in rules]
    assert links, f"no creating link for {derived}"
    return om.TraceMap.source_event(links[0].source)


def check_trace_totality(model, result) -> None:
    trace = result.trace
    derived = trace.derived_paths()
    for cls in result.object_model.classes:
        assert cls.name in derived
        for attr in cls.attributes:
            assert om.attribute_path(cls.name, attr.name) in derived
        for service in cls.services:
            assert om.service_path(cls.name, service.name) in derived
            for arg in service.arguments:
                assert om.argument_path(cls.name, service.name, arg.name) in derived
    for rel in result.object_model.relationships:
        assert om.relationship_path(rel.class_a, rel.class_b) in derived
    for txn in result.object_model.transactions:
        assert om.service_path(txn.owner_class, txn.name) in derived
    for std in result.stds:
        for state in std.states:
            assert om.state_path(std.class_name, state.name) in derived
        for t in std.transitions:
            assert om.transition_path(std.class_name, t.source, t.target, t.service) in derived
    class_names = result.object_model.class_names()
    touching = {event for cls in class_names
                for event in trace.events_touching_class(cls)}
    for event in model.events():
        assert event.id in touching, f"event {event.id} traces to no class"


def check_requested_dichotomy(result) -> None:
    trace = result.trace
    for cls in result.object_model.classes:
        creator = creating_event(trace, cls.name, ("OM4",))
        for attr in cls.attributes:
            attr_event = creating_event(trace, om.attribute_path(cls.name, attr.name),
                                        ("OM6", "OM8", "OM24"))
            assert attr.requested == (attr_event == creator), \
                f"{cls.name}.{attr.name}: requested={attr.requested}, creator={creator}, added by {attr_event}"


def check_relationship_invariants(result) -> None:
    for rel in result.object_model.relationships:
        if rel.origin in (om.REFERENCE, om.EXTENSION):
            assert rel.card_b.max == 1
        if rel.origin == om.EXTENSION:
            assert rel.card_b.min == 0


def check_shared_pairing(result) -> None:
    model = result.object_model
    for cls in model.classes:
        for service in cls.services:
            if service.kind not in (om.SHARED_INSERT, om.SHARED_DELETE):
                continue
            partner = model.class_named(service.shared_with)
            assert partner is not None
            twin = partner.service(service.name)
            assert twin is not None and twin.kind == service.kind
            if partner.name != cls.name:
                assert twin.shared_with == cls.name


def check_conditioned_transitions(result) -> None:
    specialized = {l.derived for l in result.trace.links
                   if l.rule == "DM3" and " -> " in l.derived}
    for std in result.stds:
        for t in std.transitions:
            path = om.transition_path(std.class_name, t.source, t.target, t.service)
            assert (t.condition is not None) == (path in specialized)


def check_self_arguments(result) -> None:
    for cls in result.object_model.classes:
        for service in cls.services:
            if service.kind == om.CREATION:
                assert not any(a.name.startswith("p_this") for a in service.arguments)
                continue
            assert service.arguments, f"{cls.name}.{service.name} has no arguments"
            first = service.arguments[0]
            assert first.name == "p_this" + "".join(
                part.capitalize() for part in cls.name.split("_") if part)
            assert first.kind == om.OBJECT_VALUED and first.class_ref == cls.name
            assert sum(1 for a in service.arguments if a.name.startswith("p_this")) == 1


def check_model(model) -> None:
    check_round_trip(model)
    check_validates_without_errors(model)
    result = check_deterministic(model)
    check_trace_totality(model, result)
    check_requested_dichotomy(result)
    check_relationship_invariants(result)
    check_shared_pairing(result)
    check_conditioned_transitions(result)
    check_self_arguments(result)


@pytest.mark.parametrize("seed", range(N_MODELS))
def test_random_model_properties(seed):
    check_model(random_model(seed))


def test_generator_produces_varied_models():
    events = {len(list(random_model(seed).events())) for seed in range(40)}
    assert len(events) > 4
    assert max(events) <= 12
    has_variants = any(any(e.variants for e in random_model(seed).events())
                       for seed in range(40))
    has_loopbacks = any(any(p.is_loopback for p in random_model(seed).precedences())
                        for seed in range(40))
    has_extension = any(
        any(f.extends_business_object
            for e in random_model(seed).events()
            for f in m.iter_all_fields(e.message_structure)
            if isinstance(f, m.ReferenceField))
        for seed in range(40))
    assert has_variants and has_loopbacks and has_extension


def test_generator_is_deterministic():
    assert random_model(7) == random_model(7)
    assert print_model(random_model(7)) == print_model(random_model(7))
