"""End-to-end orchestration: parse -> validate -> sort -> derive -> emit."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import model as m
from .diagnostics import Diagnostic
from .dm_rules import StateTransitionDiagram, derive_dynamic_model
from .graph import EventGraph, build_graph, extend_diagram, sort_events
from .objectmodel import ObjectModel, TraceMap
from .om_rules import derive_object_model
from .parser import parse_annotations, parse_model


@dataclass
class DerivationResult:
    model: m.RequirementsModel
    graph: EventGraph
    order: list[str]
    object_model: ObjectModel
    trace: TraceMap
    stds: list[StateTransitionDiagram]
    warnings: list[Diagnostic] = field(default_factory=list)


def load_requirements(paths: list[Path], annotations_path: Path | None = None) -> m.RequirementsModel:
    """Parse and merge one or more .carm files plus an optional annotations file."""
    model = m.RequirementsModel()
    for path in paths:
        model.merge(parse_model(path.read_text(encoding="utf-8"), str(path)))
    if annotations_path is not None:
        model.annotations.merge(
            parse_annotations(annotations_path.read_text(encoding="utf-8"), str(annotations_path)))
    return model


def derive(model: m.RequirementsModel, *, process: str | None = None,
           strict: bool = False, self_loops: bool = False) -> DerivationResult:
    """Run the full derivation over a validated requirements model."""
    graph = build_graph(model) if process is None else extend_diagram(model, process)
    order = sort_events(graph)
    warnings: list[Diagnostic] = []
    object_model, trace = derive_object_model(model, order, strict=strict,
                                              diagnostics=warnings)
    stds = derive_dynamic_model(model, object_model, graph, trace,
                                self_loops=self_loops, strict=strict,
                                diagnostics=warnings)
    return DerivationResult(model, graph, order, object_model, trace, stds, warnings)
