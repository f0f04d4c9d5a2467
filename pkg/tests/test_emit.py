from __future__ import annotations

from pathlib import Path

import pytest

from carmc.emit import (CLASS_DOT, MODEL_JSON, STD_DOT, TRACE_REPORT, EmitConfig,
                        emit_model, load_model_json, render_classes_dot,
                        render_model_json, render_std_dot, render_trace_tsv)
from carmc.objectmodel import ObjectModel, TraceMap


def test_model_json_matches_reviewed_golden(hospital_result, golden_dir):
    generated = render_model_json(hospital_result.object_model)
    assert generated == (golden_dir / "model.json").read_text()


def test_model_json_round_trips(hospital_result):
    text = render_model_json(hospital_result.object_model)
    assert load_model_json(text) == hospital_result.object_model
    assert render_model_json(load_model_json(text)) == text


def test_renderers_are_deterministic(hospital_model):
    from carmc import pipeline
    a = pipeline.derive(hospital_model)
    b = pipeline.derive(hospital_model)
    assert render_model_json(a.object_model) == render_model_json(b.object_model)
    assert render_trace_tsv(a.trace) == render_trace_tsv(b.trace)
    for std_a, std_b in zip(a.stds, b.stds):
        assert render_std_dot(std_a) == render_std_dot(std_b)
    assert render_classes_dot(a.object_model) == render_classes_dot(b.object_model)


def test_classes_dot_content(hospital_result):
    dot = render_classes_dot(hospital_result.object_model)
    assert "\"MEDICAL_TREATMENT\"" in dot
    label = next(line for line in dot.splitlines() if line.startswith('  "MEDICAL_TREATMENT" ['))
    for attr in ("treatment_number", "initial_date", "final_date", "comments",
                 "delivery_date"):
        assert attr in label
    assert "\\<\\<new\\>\\> new_medical_treatment" in label
    assert "\\<\\<shared\\>\\> ins_dispensary" in label
    assert '"MEDICAL_TREATMENT" -- "DISPENSARY" [label="0:M --- 0:1"];' in dot
    assert '"MEDICAL_TREATMENT" -- "PATIENT" [label="0:M --- 1:1"];' in dot


def test_std_dot_matches_hand_derived_golden(hospital_result, golden_dir):
    std = next(s for s in hospital_result.stds if s.class_name == "MEDICAL_TREATMENT")
    assert render_std_dot(std) == (golden_dir / "std_MEDICAL_TREATMENT.dot").read_text()


def test_std_dot_condition_labels():
    from carmc.dm_rules import State, StateTransitionDiagram, Transition, PRE_CREATION
    std = StateTransitionDiagram("C", [State("Pre_creation", PRE_CREATION), State("Aed")],
                                 [Transition("Pre_creation", "Aed", "svc", "x > 1")])
    dot = render_std_dot(std)
    assert '[label="svc when x > 1"]' in dot


def test_trace_tsv_sorted_with_expected_row(hospital_result):
    tsv = render_trace_tsv(hospital_result.trace)
    lines = tsv.splitlines()
    assert lines == sorted(lines)
    assert "OM6\tTREAT 1/MEDICAL TREATMENT/Treatment number\tMEDICAL_TREATMENT.treatment_number" in lines
    for line in lines:
        assert len(line.split("\t")) == 3


def test_empty_model_emits_empty_arrays_and_no_dot(tmp_path):
    cfg = EmitConfig((MODEL_JSON, CLASS_DOT, STD_DOT, TRACE_REPORT), tmp_path)
    written = emit_model(ObjectModel(), [], TraceMap(), cfg)
    names = sorted(p.name for p in written)
    assert names == ["model.json", "trace.tsv"]
    doc = (tmp_path / "model.json").read_text()
    assert '"classes": []' in doc and '"relationships": []' in doc \
        and '"transactions": []' in doc
    assert not (tmp_path / "classes.dot").exists()


def test_emit_writes_all_files_atomically(hospital_result, tmp_path):
    cfg = EmitConfig((MODEL_JSON, CLASS_DOT, STD_DOT, TRACE_REPORT), tmp_path)
    written = emit_model(hospital_result.object_model, hospital_result.stds,
                         hospital_result.trace, cfg)
    names = {p.name for p in written}
    assert "model.json" in names and "classes.dot" in names and "trace.tsv" in names
    assert "std_MEDICAL_TREATMENT.dot" in names and len([n for n in names if n.startswith("std_")]) == 6
    assert not list(tmp_path.glob("*.tmp"))
    again = emit_model(hospital_result.object_model, hospital_result.stds,
                       hospital_result.trace, cfg)
    for path in again:
        assert path.read_bytes() == path.read_bytes()
    first = {p.name: p.read_bytes() for p in written}
    second = {p.name: p.read_bytes() for p in again}
    assert first == second


def test_emit_config_rejects_empty_and_unknown():
    with pytest.raises(ValueError):
        EmitConfig((), Path("out"))
    with pytest.raises(ValueError):
        EmitConfig(("nope",), Path("out"))


def test_files_end_with_newline(hospital_result):
    assert render_model_json(hospital_result.object_model).endswith("\n")
    assert render_trace_tsv(hospital_result.trace).endswith("\n")
    assert render_classes_dot(hospital_result.object_model).endswith("\n")
