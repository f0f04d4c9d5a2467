"""carmc: compile communicative-event requirements models into OO conceptual models."""

from .diagnostics import (CarmError, CarmParseError, DerivationError, Diagnostic,
                          SourceLocation)
from .dm_rules import StateTransitionDiagram, derive_dynamic_model
from .emit import EmitConfig, emit_model
from .graph import EventGraph, build_graph, extend_diagram, sort_events, sub_diagram_for_class
from .model import RequirementsModel
from .objectmodel import ObjectModel, TraceMap
from .om_rules import derive_object_model, map_data_type
from .parser import parse_annotations, parse_model, print_model
from .pipeline import DerivationResult, derive, load_requirements
from .validate import validate_model

__version__ = "0.1.0"

__all__ = [
    "CarmError", "CarmParseError", "DerivationError", "Diagnostic", "SourceLocation",
    "StateTransitionDiagram", "derive_dynamic_model", "EmitConfig", "emit_model",
    "EventGraph", "build_graph", "extend_diagram", "sort_events", "sub_diagram_for_class",
    "RequirementsModel", "ObjectModel", "TraceMap", "derive_object_model", "map_data_type",
    "parse_annotations", "parse_model", "print_model", "DerivationResult", "derive",
    "load_requirements", "validate_model", "__version__",
]
