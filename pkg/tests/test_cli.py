from __future__ import annotations

import json

import pytest

from carmc.cli import main

BAD_MARKS = """
business-object Alpha
business-object Beta
process P "two marks" {
  event P 1 "bad" {
    message
      EXT =
      < First  | i | Alpha | | extends:true
        Second | i | Beta  | | extends:true
      >
    end
  }
}
"""


@pytest.fixture
def hospital_args(data_dir):
    return [str(data_dir / "hospital.carm"), "--annotations", str(data_dir / "hospital.ann")]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_derive_writes_outputs(tmp_path, capsys, hospital_args):
    out = tmp_path / "out"
    code, stdout, stderr = run(capsys, ["derive", *hospital_args, "-o", str(out),
                                        "--format", "json,dot,trace"])
    assert code == 0
    assert stdout == ""
    names = sorted(p.name for p in out.iterdir())
    assert "model.json" in names
    assert "classes.dot" in names
    assert "std_MEDICAL_TREATMENT.dot" in names
    assert "trace.tsv" in names
    doc = json.loads((out / "model.json").read_text())
    assert [c["name"] for c in doc["classes"]] == \
        ["PATIENT", "DISPENSARY", "MEDICAMENT", "NURSE", "MEDICAL_TREATMENT", "MEDICATION"]
    # warnings (defaulted cardinalities) go to stderr, outputs to files only
    assert "CARD-DEFAULT" in stderr


def test_validate_clean_model(capsys, hospital_args):
    code, stdout, stderr = run(capsys, ["validate", *hospital_args])
    assert code == 0 and stdout == "" and stderr == ""


def test_validate_reports_om2(tmp_path, capsys):
    bad = tmp_path / "bad.carm"
    bad.write_text(BAD_MARKS)
    code, stdout, stderr = run(capsys, ["validate", str(bad)])
    assert code == 1
    lines = [l for l in stderr.splitlines() if l]
    assert len(lines) == 1
    assert " OM2 " in lines[0]
    assert lines[0].startswith("ERROR ")
    assert f"{bad}:" in lines[0].replace(" ", ":", 0) or str(bad) in lines[0]


def test_dump_order_prints_and_skips_emission(tmp_path, capsys, hospital_args, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, stdout, stderr = run(capsys, ["derive", *hospital_args, "--dump-order"])
    assert code == 0
    assert stdout.splitlines() == ["APP 1", "DIS 1", "MED 1", "NUR 1", "TREAT 1", "TREAT 2"]
    assert not (tmp_path / "out").exists()


def test_derive_single_process_extends(tmp_path, capsys, hospital_args):
    code, stdout, _ = run(capsys, ["derive", *hospital_args, "--process", "TREAT",
                                   "--dump-order"])
    assert code == 0
    assert set(stdout.splitlines()) == {"APP 1", "DIS 1", "MED 1", "NUR 1",
                                        "TREAT 1", "TREAT 2"}


def test_unknown_process_is_usage_error(capsys, hospital_args):
    code, _, stderr = run(capsys, ["derive", *hospital_args, "--process", "NOPE",
                                   "--dump-order"])
    assert code == 2
    assert "NOPE" in stderr


def test_trace_command(capsys, hospital_args):
    code, stdout, _ = run(capsys, ["trace", "MEDICAL_TREATMENT.treatment_number",
                                   *hospital_args])
    assert code == 0
    lines = stdout.splitlines()
    assert any(l.startswith("OM6\tTREAT 1/MEDICAL TREATMENT/Treatment number") for l in lines)


def test_trace_event_shows_everything_it_derived(capsys, hospital_args):
    code, stdout, _ = run(capsys, ["trace", "TREAT 2", *hospital_args])
    assert code == 0
    assert "MEDICAL_TREATMENT.delivery_date" in stdout
    assert "MEDICAL_TREATMENT--DISPENSARY" in stdout


def test_missing_input_is_usage_error(capsys):
    code, _, stderr = run(capsys, ["validate", "no-such-file.carm"])
    assert code == 2
    assert "no-such-file.carm" in stderr


def test_unknown_flag_is_usage_error(capsys, hospital_args):
    code, _, _ = run(capsys, ["derive", *hospital_args, "--frobnicate"])
    assert code == 2


def test_unknown_format_is_usage_error(capsys, hospital_args):
    code, _, stderr = run(capsys, ["derive", *hospital_args, "--format", "yaml"])
    assert code == 2
    assert "yaml" in stderr


def test_format_selection_json_only(tmp_path, capsys, hospital_args):
    out = tmp_path / "only-json"
    code, _, _ = run(capsys, ["derive", *hospital_args, "-o", str(out),
                              "--format", "json"])
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == ["model.json"]


def test_strict_mode_fails_on_fallbacks(tmp_path, capsys, hospital_args):
    out = tmp_path / "strict-out"
    code, _, stderr = run(capsys, ["derive", *hospital_args, "-o", str(out), "--strict",
                                   "--format", "json"])
    assert code == 1
    assert "CARD-DEFAULT" in stderr
    assert not out.exists() or not list(out.iterdir())  # no partial files


def test_invalid_model_blocks_derivation(tmp_path, capsys):
    bad = tmp_path / "bad.carm"
    bad.write_text(BAD_MARKS)
    out = tmp_path / "never"
    code, _, stderr = run(capsys, ["derive", str(bad), "-o", str(out)])
    assert code == 1
    assert " OM2 " in stderr
    assert not out.exists()


def test_parse_error_reported_with_location(tmp_path, capsys):
    bad = tmp_path / "syntax.carm"
    bad.write_text("process P {\n  event P 1 \"x\" {\n}\n")
    code, _, stderr = run(capsys, ["validate", str(bad)])
    assert code == 1
    assert "SYNTAX" in stderr and "syntax.carm" in stderr
