"""Diagnostics, source locations, and the error types raised by the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

ERROR = "error"
WARNING = "warning"

# Diagnostic codes. Rule-anchored codes (OM2) keep the code equal to the rule
# id; everything else uses a short artifact code.
SYNTAX = "SYNTAX"
DUP_EVENT = "DUP-EVENT"
UNKNOWN_OBJECT = "UNKNOWN-OBJECT"
MIXED_MERGE = "MIXED-MERGE"
DOUBLE_MARK = "OM2"
DANGLING = "DANGLING"
CYCLE = "CYCLE"
ROOT_AGG = "ROOT-AGG"
MEMBER_DUP = "MEMBER-DUP"
VARIANT_FIELD = "VARIANT-FIELD"
VARIANT_EMPTY = "VARIANT-EMPTY"
VARIANT_DUP = "VARIANT-DUP"
IDENT_FIELD = "IDENT-FIELD"
RESTRICTION_FIELD = "RESTRICTION-FIELD"
RESTRICTION_CONFLICT = "RESTRICTION-CONFLICT"
ANNOTATION_TARGET = "ANNOTATION-TARGET"
PROCESS_PREFIX = "PROCESS-PREFIX"
RESERVED_ID = "RESERVED-ID"
OP_CODE = "OP-CODE"
INCOMPLETE = "INCOMPLETE"
ORDERING = "ORDERING"
DATA_TYPE = "DATA-TYPE"
UNKNOWN_CLASS = "UNKNOWN-CLASS"
ANNOTATION_IGNORED = "ANNOTATION-IGNORED"
SIZE_DEFAULT = "SIZE-DEFAULT"
CARD_DEFAULT = "CARD-DEFAULT"
SERVICE_NAME_DEFAULT = "SERVICE-NAME-DEFAULT"
NAME_COLLISION = "NAME-COLLISION"
REQUESTED_IGNORED = "REQUESTED-IGNORED"
LOOPBACK_DROPPED = "LOOPBACK-DROPPED"
AND_JOIN_ROOT = "AND-JOIN-ROOT"
AND_JOIN_VARIANT = "AND-JOIN-VARIANT"
STATE_COLLISION = "STATE-COLLISION"
NO_SERVICE = "NO-SERVICE"


@dataclass(frozen=True)
class SourceLocation:
    """Position of a model element in its input file (1-based line/column)."""

    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


UNKNOWN_LOC = SourceLocation("<memory>", 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    loc: SourceLocation
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.upper()} {self.loc} {self.code} {self.message}"

    def sort_key(self) -> tuple:
        return (self.loc.file, self.loc.line, self.loc.col, self.code, self.message)


def error(loc: SourceLocation, code: str, message: str) -> Diagnostic:
    return Diagnostic(ERROR, loc, code, message)


def warning(loc: SourceLocation, code: str, message: str) -> Diagnostic:
    return Diagnostic(WARNING, loc, code, message)


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


class CarmError(Exception):
    """Base class for pipeline failures that carry a diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


class CarmParseError(CarmError):
    """Raised by the parser on malformed input."""


class DerivationError(CarmError):
    """Raised when a derivation rule cannot be applied to the model."""


@dataclass
class DiagnosticSink:
    """Accumulates warnings emitted while deriving; promotes to errors in strict mode."""

    strict: bool = False
    items: list[Diagnostic] = field(default_factory=list)

    def warn(self, loc: SourceLocation, code: str, message: str,
             strict_error: bool = False) -> None:
        if strict_error and self.strict:
            raise DerivationError(error(loc, code, message))
        self.items.append(warning(loc, code, message))

    def extend_into(self, out: list[Diagnostic] | None) -> None:
        if out is not None:
            out.extend(self.items)
