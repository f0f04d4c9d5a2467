"""Parser and pretty-printer for the .carm requirements-model format.

The format is line oriented. A file holds `business-object` declarations,
`process` blocks, and optionally an `annotations` block. Message structures
use the aggregation/iteration notation directly::

    message
      MEDICAL TREATMENT =
      < Treatment number + | g | number | 26411
        MEDICATIONS =
        { MEDICATION =
          < Dosage + | i | text | 1 tab 1Mg
          >
        }
      >
    end

Field rows carry `name | op | domain | example` columns plus an optional
`extends:true` column marking the reference field that extends an existing
business object. Restriction, identifier, and annotation paths are relative
to the root aggregation, segments separated by `/`.
"""

from __future__ import annotations

import re

from . import model as m
from .diagnostics import (
    DUP_EVENT,
    MIXED_MERGE,
    SYNTAX,
    UNKNOWN_OBJECT,
    CarmParseError,
    SourceLocation,
    error,
)

_PRECEDENCE_RE = re.compile(r"^(precedence)\s+(.+?)\s*->\s*(.+?)(?:\s*\[([^\]]*)\])?$")
_VARIANT_RE = re.compile(r"^variant\s+(.+?)\s+when\s+(.+)$")
_RESTRICTION_RE = re.compile(
    r"^restriction\s+(.+?)(?:\s+referenced\s+(\S+))?(?:\s+referrer\s+(\S+))?$"
)
_HEADER_RE = re.compile(r"^(process|event)\s+(.+?)\s*(\"[^\"]*\")?\s*\{$")
_ANNOTATION_RE = re.compile(r"^(.+?)\s*:\s*([a-z-]+)\s*=\s*(.*)$")

_MERGE_MODS = {"or-merge": m.OR_MERGE, "and-join": m.AND_JOIN}


class _Reader:
    """Cursor over the meaningful lines of one source file."""

    def __init__(self, text: str, file: str):
        self.file = file
        self.lines: list[tuple[int, str]] = []
        for i, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            self.lines.append((i, stripped))
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.lines)

    def peek(self) -> tuple[int, str]:
        return self.lines[self.pos]

    def take(self) -> tuple[int, str]:
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def loc(self, lineno: int, col: int = 1) -> SourceLocation:
        return SourceLocation(self.file, lineno, col)

    def fail(self, lineno: int, message: str) -> CarmParseError:
        return CarmParseError(error(self.loc(lineno), SYNTAX, message))


def _split_path(text: str) -> tuple[str, ...]:
    return tuple(seg.strip() for seg in text.split("/"))


def _parse_cardinality(reader: _Reader, lineno: int, text: str) -> m.Cardinality:
    try:
        return m.Cardinality.parse(text)
    except ValueError as exc:
        raise reader.fail(lineno, str(exc)) from None


def _parse_field_row(reader: _Reader, lineno: int, row: str) -> m.DataField | m.ReferenceField:
    cols = [c.strip() for c in row.split("|")]
    if len(cols) < 3:
        raise reader.fail(lineno, "field row needs 'name | op | domain' columns at least")
    name = cols[0].rstrip("+").strip()
    if not name:
        raise reader.fail(lineno, "field row has an empty name")
    op, domain = cols[1], cols[2]
    example = cols[3] if len(cols) > 3 else ""
    extends_col = cols[4] if len(cols) > 4 else ""
    if not domain:
        raise reader.fail(lineno, f"field {name!r} is missing a domain")
    loc = reader.loc(lineno)
    if m.is_basic_domain(domain):
        if extends_col:
            raise reader.fail(lineno, f"extends mark on data field {name!r}; only reference fields can extend")
        return m.DataField(name, op, domain, example, loc)
    extends = False
    if extends_col:
        lowered = extends_col.lower()
        if lowered == "extends:true":
            extends = True
        elif lowered != "extends:false":
            raise reader.fail(lineno, f"expected 'extends:true' or 'extends:false', got {extends_col!r}")
    return m.ReferenceField(name, op, domain, example, extends, loc)


def _tokenize_message(reader: _Reader) -> list[tuple]:
    """Tokens for one message block: openers/closers, headers, field rows."""
    tokens: list[tuple] = []
    while True:
        if reader.eof():
            raise reader.fail(reader.lines[-1][0] if reader.lines else 0,
                              "message block is not closed with 'end'")
        lineno, line = reader.take()
        if line == "end":
            return tokens
        rest = line
        while rest and rest[0] in "<>{}":
            tokens.append((rest[0], None, lineno))
            rest = rest[1:].lstrip()
        if not rest:
            continue
        if rest.endswith("="):
            name = rest[:-1].strip()
            if not name:
                raise reader.fail(lineno, "substructure header has an empty name")
            tokens.append(("header", name, lineno))
        else:
            tokens.append(("row", rest, lineno))


class _TokenCursor:
    def __init__(self, reader: _Reader, tokens: list[tuple]):
        self.reader = reader
        self.tokens = tokens
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.tokens)

    def peek(self) -> tuple:
        if self.eof():
            raise self.reader.fail(self.tokens[-1][2] if self.tokens else 0,
                                   "message structure ends unexpectedly")
        return self.tokens[self.pos]

    def take(self) -> tuple:
        tok = self.peek()
        self.pos += 1
        return tok


def _parse_substructure(cur: _TokenCursor) -> m.Substructure:
    kind, name, lineno = cur.take()
    if kind != "header":
        raise cur.reader.fail(lineno, "expected a substructure header ('NAME =')")
    opener, _, open_line = cur.take()
    loc = cur.reader.loc(lineno)
    if opener == "<":
        members: list = []
        while True:
            k, value, ln = cur.peek()
            if k == ">":
                cur.take()
                return m.Aggregation(name, members, loc)
            if k == "row":
                cur.take()
                members.append(_parse_field_row(cur.reader, ln, value))
            elif k == "header":
                members.append(_parse_substructure(cur))
            else:
                raise cur.reader.fail(ln, f"unexpected {k!r} inside aggregation {name!r}; expected a field row, a nested substructure, or '>'")
    if opener == "{":
        body = _parse_substructure(cur)
        k, _, ln = cur.take()
        if k != "}":
            raise cur.reader.fail(ln, f"iteration {name!r} must close with '}}' after its single substructure")
        if not isinstance(body, (m.Aggregation, m.Iteration)):
            raise cur.reader.fail(ln, f"iteration {name!r} body must be a named substructure")
        return m.Iteration(name, body, loc)
    raise cur.reader.fail(open_line, f"expected '<' or '{{' after substructure header {name!r}")


def _parse_message(reader: _Reader) -> m.Substructure:
    tokens = _tokenize_message(reader)
    cur = _TokenCursor(reader, tokens)
    structure = _parse_substructure(cur)
    if not cur.eof():
        _, _, ln = cur.peek()
        raise reader.fail(ln, "unexpected content after the root message structure")
    return structure


def _parse_event(reader: _Reader, header_line: int, event_id: str, name: str) -> m.CommunicativeEvent:
    event = m.CommunicativeEvent(event_id, name, loc=reader.loc(header_line))
    while True:
        if reader.eof():
            raise reader.fail(header_line, f"event {event_id!r} block is not closed")
        lineno, line = reader.take()
        if line == "}":
            if event.message_structure is None:
                raise reader.fail(header_line, f"event {event_id!r} has no message block")
            return event
        if line == "message":
            if event.message_structure is not None:
                raise reader.fail(lineno, f"event {event_id!r} has more than one message block")
            event.message_structure = _parse_message(reader)
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "primary-actor":
            event.primary_actor = rest
        elif keyword == "interface-actor":
            event.interface_actor = rest
        elif keyword == "goals":
            event.goals = rest
        elif keyword == "description":
            event.description = rest
        elif keyword == "linked-communications":
            event.linked_communications = rest
        elif keyword == "identifier":
            paths = [p.strip() for p in rest.split(",") if p.strip()]
            if not paths:
                raise reader.fail(lineno, "identifier needs at least one field path")
            event.identifier_restriction.extend(_split_path(p) for p in paths)
        elif keyword == "restriction":
            match = _RESTRICTION_RE.match(line)
            if not match or (match.group(2) is None and match.group(3) is None):
                raise reader.fail(lineno, "expected 'restriction <path> [referenced min:max] [referrer min:max]'")
            referenced = match.group(2) and _parse_cardinality(reader, lineno, match.group(2))
            referrer = match.group(3) and _parse_cardinality(reader, lineno, match.group(3))
            event.structural_restrictions.append(
                m.CardinalityRestriction(_split_path(match.group(1)), referenced or None,
                                         referrer or None, reader.loc(lineno)))
        elif keyword == "variant":
            match = _VARIANT_RE.match(line)
            if not match:
                raise reader.fail(lineno, "expected 'variant <id> when <condition>'")
            event.variants.append(m.EventVariant(match.group(1), match.group(2).strip(),
                                                 reader.loc(lineno)))
        else:
            raise reader.fail(lineno, f"unexpected {line.split()[0]!r} inside event {event_id!r}")


def _parse_precedence(reader: _Reader, lineno: int, line: str) -> m.PrecedenceRelation:
    match = _PRECEDENCE_RE.match(line)
    if not match:
        raise reader.fail(lineno, "expected 'precedence <source> -> <target> [modifiers]'")
    source, target = match.group(2).strip(), match.group(3).strip()
    merge, loopback = m.PLAIN, False
    if match.group(4):
        for mod in (s.strip() for s in match.group(4).split(",")):
            if mod == "loopback":
                loopback = True
            elif mod in _MERGE_MODS:
                merge = _MERGE_MODS[mod]
            else:
                raise reader.fail(lineno, f"unknown precedence modifier {mod!r}; expected or-merge, and-join, or loopback")
    return m.PrecedenceRelation(source, target, merge, loopback, reader.loc(lineno))


def _parse_process(reader: _Reader, header_line: int, process_id: str, name: str) -> m.BusinessProcess:
    process = m.BusinessProcess(process_id, name, loc=reader.loc(header_line))
    while True:
        if reader.eof():
            raise reader.fail(header_line, f"process {process_id!r} block is not closed")
        lineno, line = reader.peek()
        if line == "}":
            reader.take()
            process.has_start_node = any(p.source == m.START for p in process.precedences)
            return process
        if line.startswith("event ") or line.startswith("event\t"):
            reader.take()
            match = _HEADER_RE.match(line)
            if not match or match.group(1) != "event":
                raise reader.fail(lineno, "expected 'event <id> [\"name\"] {'")
            ev_name = (match.group(3) or '""')[1:-1]
            process.events.append(_parse_event(reader, lineno, match.group(2).strip(), ev_name))
        elif line.startswith("precedence"):
            reader.take()
            process.precedences.append(_parse_precedence(reader, lineno, line))
        else:
            raise reader.fail(lineno, f"unexpected {line.split()[0]!r} inside process {process_id!r}")


def parse_annotation_lines(reader: _Reader, until_brace: bool) -> m.AnnotationSet:
    out = m.AnnotationSet()
    while not reader.eof():
        lineno, line = reader.peek()
        if until_brace and line == "}":
            reader.take()
            return out
        reader.take()
        match = _ANNOTATION_RE.match(line)
        if not match:
            raise reader.fail(lineno, "expected '<event> [/ path...] : property = value'")
        prop = match.group(2)
        if prop not in m.ANNOTATION_PROPS:
            raise reader.fail(lineno, f"unknown annotation property {prop!r}")
        out.entries.append(m.AnnotationEntry(_split_path(match.group(1)), prop,
                                             match.group(3).strip(), reader.loc(lineno)))
    if until_brace:
        raise reader.fail(reader.lines[-1][0] if reader.lines else 0,
                          "annotations block is not closed")
    return out


def _check_semantics(model: m.RequirementsModel, reader: _Reader) -> None:
    seen: dict[str, SourceLocation] = {}
    for event in model.events():
        if event.id in seen:
            raise CarmParseError(error(event.loc, DUP_EVENT,
                                       f"duplicate event id {event.id!r} (first declared at {seen[event.id]})"))
        seen[event.id] = event.loc
    objects = model.business_object_keys()
    for event in model.events():
        for f in m.iter_all_fields(event.message_structure):
            if isinstance(f, m.ReferenceField) and m.canonical_key(f.domain) not in objects:
                raise CarmParseError(error(f.loc, UNKNOWN_OBJECT,
                                           f"reference field {f.name!r} names undeclared business object {f.domain!r}"))
    incoming: dict[str, str] = {}
    for p in model.precedences():
        if p.target in (m.END,):
            continue
        prior = incoming.get(p.target)
        if prior is not None and prior != p.merge_kind:
            raise CarmParseError(error(p.loc, MIXED_MERGE,
                                       f"event {p.target!r} mixes {prior} and {p.merge_kind} incoming precedences"))
        incoming[p.target] = p.merge_kind


def parse_model(source_text: str, file: str = "<string>") -> m.RequirementsModel:
    """Parse one .carm file into a requirements model.

    Raises CarmParseError on syntax errors, duplicate event ids, undeclared
    business objects, and mixed merge kinds. Remaining invariants are
    reported by validate_model.
    """
    reader = _Reader(source_text, file)
    model = m.RequirementsModel()
    while not reader.eof():
        lineno, line = reader.take()
        if line.startswith("business-object"):
            name = line[len("business-object"):].strip()
            if not name:
                raise reader.fail(lineno, "business-object declaration needs a name")
            model.business_objects.append(name)
        elif line.startswith("process"):
            match = _HEADER_RE.match(line)
            if not match or match.group(1) != "process":
                raise reader.fail(lineno, "expected 'process <id> [\"name\"] {'")
            proc_name = (match.group(3) or '""')[1:-1]
            model.processes.append(_parse_process(reader, lineno, match.group(2).strip(), proc_name))
        elif line == "annotations {":
            model.annotations.merge(parse_annotation_lines(reader, until_brace=True))
        else:
            raise reader.fail(lineno, f"expected 'business-object', 'process', or 'annotations', got {line.split()[0]!r}")
    _check_semantics(model, reader)
    return model


def parse_annotations(source_text: str, file: str = "<annotations>") -> m.AnnotationSet:
    """Parse a standalone annotations file (bare annotation lines)."""
    return parse_annotation_lines(_Reader(source_text, file), until_brace=False)


# ---------------------------------------------------------------------------
# Pretty printer. parse_model(print_model(model)) is structurally equal to
# the original model (source locations excluded from equality).

def _print_field(f, last: bool) -> str:
    plus = "" if last else " +"
    cols = [f"{f.name}{plus}", f.op, f.domain, f.example]
    if isinstance(f, m.ReferenceField) and f.extends_business_object:
        cols.append("extends:true")
    return " | ".join(cols).rstrip()


def _print_structure(s: m.Substructure, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    out.append(f"{pad}{s.name} =")
    if isinstance(s, m.Aggregation):
        out.append(f"{pad}<")
        for i, member in enumerate(s.members):
            if isinstance(member, (m.Aggregation, m.Iteration)):
                _print_structure(member, indent + 1, out)
            else:
                out.append(f"{pad}  {_print_field(member, i == len(s.members) - 1)}")
        out.append(f"{pad}>")
    else:
        out.append(f"{pad}{{")
        _print_structure(s.body, indent + 1, out)
        out.append(f"{pad}}}")


def _print_event(event: m.CommunicativeEvent, out: list[str]) -> None:
    out.append(f'  event {event.id} "{event.name}" {{')
    if event.primary_actor:
        out.append(f"    primary-actor {event.primary_actor}")
    if event.interface_actor:
        out.append(f"    interface-actor {event.interface_actor}")
    if event.goals:
        out.append(f"    goals {event.goals}")
    if event.description:
        out.append(f"    description {event.description}")
    out.append("    message")
    if event.message_structure is not None:
        _print_structure(event.message_structure, 3, out)
    out.append("    end")
    for r in event.structural_restrictions:
        parts = [f"restriction {'/'.join(r.subject)}"]
        if r.referenced is not None:
            parts.append(f"referenced {r.referenced}")
        if r.referrer is not None:
            parts.append(f"referrer {r.referrer}")
        out.append("    " + " ".join(parts))
    for path in event.identifier_restriction:
        out.append(f"    identifier {'/'.join(path)}")
    for v in event.variants:
        out.append(f"    variant {v.id} when {v.condition}")
    if event.linked_communications:
        out.append(f"    linked-communications {event.linked_communications}")
    out.append("  }")


def print_model(model: m.RequirementsModel) -> str:
    out: list[str] = []
    for b in model.business_objects:
        out.append(f"business-object {b}")
    for process in model.processes:
        if out:
            out.append("")
        out.append(f'process {process.id} "{process.name}" {{')
        for event in process.events:
            _print_event(event, out)
        for p in process.precedences:
            mods = []
            if p.merge_kind == m.OR_MERGE:
                mods.append("or-merge")
            elif p.merge_kind == m.AND_JOIN:
                mods.append("and-join")
            if p.is_loopback:
                mods.append("loopback")
            suffix = f" [{', '.join(mods)}]" if mods else ""
            out.append(f"  precedence {p.source} -> {p.target}{suffix}")
        out.append("}")
    if model.annotations.entries:
        out.append("")
        out.append("annotations {")
        for e in model.annotations.entries:
            out.append(f"  {' / '.join(e.path)} : {e.prop} = {e.value}")
        out.append("}")
    return "\n".join(out) + "\n"
