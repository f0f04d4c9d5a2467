"""Serialize derivation results into stable, diffable output files.

All emitters are deterministic: JSON keys are alphabetical, lists keep
derivation order, trace rows are sorted, files end with a newline. Files are
written to a temporary name and renamed, so failed runs leave no partial
output behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import objectmodel as om
from .dm_rules import AUXILIARY, PRE_CREATION, StateTransitionDiagram
from .model import MANY, Cardinality

MODEL_JSON = "model_json"
CLASS_DOT = "class_dot"
STD_DOT = "std_dot"
TRACE_REPORT = "trace_report"
FIGURES = "figures"
ALL_FORMATS = (MODEL_JSON, CLASS_DOT, STD_DOT, TRACE_REPORT, FIGURES)


@dataclass(frozen=True)
class EmitConfig:
    formats: tuple[str, ...]
    out_dir: Path

    def __post_init__(self) -> None:
        if not self.formats:
            raise ValueError("at least one emit format must be selected")
        unknown = [f for f in self.formats if f not in ALL_FORMATS]
        if unknown:
            raise ValueError(f"unknown emit formats: {', '.join(unknown)}")


def _card_dict(card: Cardinality) -> dict:
    return {"max": card.max, "min": card.min}


def _card_from_dict(data: dict) -> Cardinality:
    return Cardinality(data["min"], MANY if data["max"] == MANY else int(data["max"]))


def render_model_json(model: om.ObjectModel) -> str:
    doc = {
        "classes": [
            {
                "name": cls.name,
                "attributes": [
                    {
                        "attr_type": a.attr_type,
                        "data_type": a.data_type,
                        "id": a.id,
                        "name": a.name,
                        "null_allowed": a.null_allowed,
                        "requested": a.requested,
                        "size": a.size,
                    }
                    for a in cls.attributes
                ],
                "services": [
                    {
                        "agents": s.agents,
                        "arguments": [
                            {
                                "class_ref": arg.class_ref,
                                "data_type": arg.data_type,
                                "kind": arg.kind,
                                "name": arg.name,
                                "null_allowed": arg.null_allowed,
                                "size": arg.size,
                            }
                            for arg in s.arguments
                        ],
                        "kind": s.kind,
                        "name": s.name,
                        "shared_with": s.shared_with,
                    }
                    for s in cls.services
                ],
            }
            for cls in model.classes
        ],
        "relationships": [
            {
                "card_a": _card_dict(r.card_a),
                "card_b": _card_dict(r.card_b),
                "class_a": r.class_a,
                "class_b": r.class_b,
                "origin": r.origin,
            }
            for r in model.relationships
        ],
        "transactions": [
            {"components": t.components, "name": t.name, "owner_class": t.owner_class}
            for t in model.transactions
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_model_json(text: str) -> om.ObjectModel:
    """Inverse of render_model_json, for round-trip checks and consumers."""
    doc = json.loads(text)
    model = om.ObjectModel()
    for c in doc["classes"]:
        cls = om.Class(c["name"])
        for a in c["attributes"]:
            cls.attributes.append(om.Attribute(
                a["name"], id=a["id"], attr_type=a["attr_type"], data_type=a["data_type"],
                size=a["size"], requested=a["requested"], null_allowed=a["null_allowed"]))
        for s in c["services"]:
            service = om.Service(s["name"], s["kind"], agents=list(s["agents"]),
                                 shared_with=s["shared_with"])
            for arg in s["arguments"]:
                service.arguments.append(om.Argument(
                    arg["name"], arg["kind"], data_type=arg["data_type"],
                    class_ref=arg["class_ref"], size=arg["size"],
                    null_allowed=arg["null_allowed"]))
            cls.services.append(service)
        model.classes.append(cls)
    for r in doc["relationships"]:
        model.relationships.append(om.StructuralRelationship(
            r["class_a"], r["class_b"], _card_from_dict(r["card_a"]),
            _card_from_dict(r["card_b"]), r["origin"]))
    for t in doc["transactions"]:
        model.transactions.append(om.Transaction(t["name"], t["owner_class"],
                                                 list(t["components"])))
    return model


# --- graphviz ---------------------------------------------------------------

_SERVICE_TAGS = {om.CREATION: "<<new>> ", om.SHARED_INSERT: "<<shared>> ",
                 om.SHARED_DELETE: "<<shared>> "}


def _record_escape(text: str) -> str:
    for ch in "\\{}<>|":
        text = text.replace(ch, "\\" + ch)
    return text


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def render_classes_dot(model: om.ObjectModel) -> str | None:
    """Class diagram as a graphviz record graph; None when there is nothing to draw."""
    if not model.classes:
        return None
    lines = ["graph classes {", "  node [shape=record];"]
    for cls in model.classes:
        attrs = "\\l".join(_record_escape(a.name) for a in cls.attributes)
        services = "\\l".join(_record_escape(_SERVICE_TAGS.get(s.kind, "") + s.name)
                              for s in cls.services)
        label = "{" + _record_escape(cls.name) + "|" + attrs + ("\\l" if attrs else "") \
                + "|" + services + ("\\l" if services else "") + "}"
        lines.append(f"  {_quote(cls.name)} [label=\"{label}\"];")
    for r in model.relationships:
        label = f"{r.card_a} --- {r.card_b}"
        lines.append(f"  {_quote(r.class_a)} -- {_quote(r.class_b)} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_std_dot(std: StateTransitionDiagram) -> str:
    lines = [f"digraph {_quote('std_' + std.class_name)} {{", "  rankdir=TB;"]
    for state in std.states:
        if state.kind == PRE_CREATION:
            lines.append(f"  {_quote(state.name)} [shape=circle, style=filled, "
                         f"fillcolor=black, label=\"\", width=0.25];")
        elif state.kind == AUXILIARY:
            lines.append(f"  {_quote(state.name)} [shape=ellipse, style=dashed];")
        else:
            lines.append(f"  {_quote(state.name)} [shape=ellipse];")
    for t in std.transitions:
        lines.append(f"  {_quote(t.source)} -> {_quote(t.target)} [label={_quote(t.label())}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_trace_tsv(trace: om.TraceMap) -> str:
    rows = [f"{l.rule}\t{l.source}\t{l.derived}" for l in trace.sorted_links()]
    return "\n".join(rows) + ("\n" if rows else "")


# --- file output -------------------------------------------------------------

def _write_atomic(path: Path, text: str) -> Path:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def std_file_name(class_name: str) -> str:
    return f"std_{class_name}.dot"


def emit_model(model: om.ObjectModel, stds: list[StateTransitionDiagram],
               trace: om.TraceMap, cfg: EmitConfig) -> list[Path]:
    """Write the selected formats into cfg.out_dir; returns the written paths."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if MODEL_JSON in cfg.formats:
        written.append(_write_atomic(cfg.out_dir / "model.json", render_model_json(model)))
    if CLASS_DOT in cfg.formats:
        dot = render_classes_dot(model)
        if dot is not None:
            written.append(_write_atomic(cfg.out_dir / "classes.dot", dot))
    if STD_DOT in cfg.formats:
        for std in stds:
            written.append(_write_atomic(cfg.out_dir / std_file_name(std.class_name),
                                         render_std_dot(std)))
    if TRACE_REPORT in cfg.formats:
        written.append(_write_atomic(cfg.out_dir / "trace.tsv", render_trace_tsv(trace)))
    if FIGURES in cfg.formats:
        from . import figures
        written.extend(figures.render_figures(model, stds, cfg.out_dir))
    return written
