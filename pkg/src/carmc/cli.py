"""Command-line interface.

    carmc validate model.carm [--annotations model.ann] [--strict]
    carmc derive model.carm [-o out/] [--format json,dot,trace,figures]
                 [--process ID] [--dump-order] [--self-loops] [--strict]
    carmc trace "MEDICAL_TREATMENT.treatment_number" model.carm ...

Diagnostics go to standard error as `SEVERITY file:line:col CODE message`;
derived artifacts go to files only. Exit codes: 0 success, 1 error-severity
diagnostics, 2 usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .diagnostics import ERROR, CarmError, Diagnostic, sort_diagnostics
from .emit import (ALL_FORMATS, CLASS_DOT, FIGURES, MODEL_JSON, STD_DOT,
                   TRACE_REPORT, EmitConfig, emit_model)
from .pipeline import derive, load_requirements
from .validate import validate_model

_FORMAT_ALIASES = {
    "json": (MODEL_JSON,),
    "dot": (CLASS_DOT, STD_DOT),
    "trace": (TRACE_REPORT,),
    "figures": (FIGURES,),
}
_DEFAULT_FORMATS = "json,dot,trace,figures"

USAGE_ERROR = 2


class _UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="carmc",
                                     description="Compile communicative-event requirements models "
                                                 "into class diagrams and state machines.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("inputs", nargs="+", type=Path, metavar="FILE.carm")
        p.add_argument("--annotations", type=Path, default=None,
                       help="separate annotations file")
        p.add_argument("--strict", action="store_true",
                       help="turn analyst-decision fallbacks into errors")

    validate_p = sub.add_parser("validate", help="report diagnostics for a model")
    add_common(validate_p)

    derive_p = sub.add_parser("derive", help="run the full derivation and write outputs")
    add_common(derive_p)
    derive_p.add_argument("--process", default=None,
                          help="derive only this process (extended with its precedents)")
    derive_p.add_argument("--self-loops", action="store_true",
                          help="add self-loop transitions for edit and shared services")
    derive_p.add_argument("--format", default=_DEFAULT_FORMATS,
                          help=f"comma list from json,dot,trace,figures (default {_DEFAULT_FORMATS})")
    derive_p.add_argument("-o", "--out", type=Path,
                          default=Path(os.environ.get("CARMC_OUT", "out")),
                          help="output directory (default $CARMC_OUT or ./out)")
    derive_p.add_argument("--dump-order", action="store_true",
                          help="print the event processing order and skip emission")

    trace_p = sub.add_parser("trace", help="print the trace links touching one element")
    trace_p.add_argument("element", help="element path, e.g. MEDICAL_TREATMENT.treatment_number")
    add_common(trace_p)
    trace_p.add_argument("--process", default=None)
    return parser


def _print_diagnostics(diags: list[Diagnostic]) -> bool:
    has_errors = False
    for d in sort_diagnostics(diags):
        print(d, file=sys.stderr)
        has_errors = has_errors or d.severity == ERROR
    return has_errors


def _load(args) -> object:
    for path in list(args.inputs) + ([args.annotations] if args.annotations else []):
        if not path.is_file():
            raise _UsageError(f"cannot read {path}")
    return load_requirements(args.inputs, args.annotations)


def _parse_formats(spec: str) -> tuple[str, ...]:
    formats: list[str] = []
    for word in (w.strip() for w in spec.split(",") if w.strip()):
        expanded = _FORMAT_ALIASES.get(word, (word,) if word in ALL_FORMATS else None)
        if expanded is None:
            raise _UsageError(f"unknown format {word!r}; expected json, dot, trace, figures")
        formats.extend(f for f in expanded if f not in formats)
    if not formats:
        raise _UsageError("no emit format selected")
    return tuple(formats)


def _cmd_validate(args) -> int:
    model = _load(args)
    return 1 if _print_diagnostics(validate_model(model)) else 0


def _validated_derivation(args, process):
    model = _load(args)
    diagnostics = validate_model(model)
    if _print_diagnostics(diagnostics):
        return None
    if process is not None and model.process_by_id(process) is None:
        raise _UsageError(f"process {process!r} does not exist in the model")
    result = derive(model, process=process, strict=args.strict,
                    self_loops=getattr(args, "self_loops", False))
    _print_diagnostics(result.warnings)
    return result


def _cmd_derive(args) -> int:
    formats = _parse_formats(args.format)
    result = _validated_derivation(args, args.process)
    if result is None:
        return 1
    if args.dump_order:
        for event_id in result.order:
            print(event_id)
        return 0
    cfg = EmitConfig(formats, args.out)
    emit_model(result.object_model, result.stds, result.trace, cfg)
    return 0


def _cmd_trace(args) -> int:
    result = _validated_derivation(args, args.process)
    if result is None:
        return 1
    for link in result.trace.links_for(args.element):
        print(f"{link.rule}\t{link.source}\t{link.derived}")
    return 0


_COMMANDS = {"validate": _cmd_validate, "derive": _cmd_derive, "trace": _cmd_trace}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"carmc: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except CarmError as exc:
        print(exc.diagnostic, file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"carmc: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
