"""Catalog of the derivation rules applied by the compiler.

Rule ids stamp every trace link and appear in diagnostics, trace.tsv, and the
CLI `trace` output. OM rules build the object model, DM rules build the
per-class state-transition diagrams. Two historically distinct DM steps share
the number 2; they are disambiguated here as DM2A/DM2B.
"""

OM_RULES = {
    "OM1": "extend a communicative event diagram with all transitive precedent events",
    "OM2": "mark at most one reference field per aggregation as extending a business object",
    "OM3": "order events by a deterministic topological sort of the precedence graph",
    "OM4": "each unmarked aggregation substructure creates a class",
    "OM5": "class names come from the aggregation name (uppercase, underscores)",
    "OM6": "each data field of a substructure adds an attribute to its class",
    "OM7": "attribute names come from the data field name (lowercase, underscores)",
    "OM8": "the class identifier comes from the identifier restriction, an annotation, or a synthesized autonumeric attribute",
    "OM9": "identifier attributes are constant, the rest variable unless annotated",
    "OM10": "attribute data types map from field domains via the conversion table",
    "OM11": "attributes of a newly created class are requested upon creation",
    "OM12": "identifier attributes forbid nulls, the rest allow them unless annotated",
    "OM13": "nested aggregation substructures derive a structural relationship",
    "OM14": "the nested side of a nesting relationship has max cardinality M under an iteration, else 1",
    "OM15": "remaining cardinalities come from restrictions, annotations, or defaults",
    "OM16": "each unmarked reference field derives a structural relationship",
    "OM17": "the referenced side of a reference relationship has max cardinality 1",
    "OM18": "each new class gets a creation service",
    "OM19": "data fields add data-valued creation arguments mirroring their attributes",
    "OM20": "reference fields add object-valued creation arguments typed by the referenced class",
    "OM21": "a structure deriving several classes adds an end-of-editing service to the root class",
    "OM22": "every non-creation service takes a leading self argument",
    "OM23": "a marked reference field extends the referenced business object's class",
    "OM24": "extension attributes are variable, not requested, not identifying, and nullable",
    "OM25": "extensions add an edit service and paired shared insert/delete services",
    "OM26": "an extension producing several services composes them into a transaction",
}

DM_RULES = {
    "DM1": "restrict the event graph to the events that touch one class",
    "DM2A": "initialize each state machine with a pre-creation state",
    "DM2B": "a plain event adds an '-ed' state and one transition per precedent",
    "DM3": "a specialized event adds one state per variant with conditioned transitions",
    "DM4": "an and-join unfolds into a lattice of auxiliary states over its precedents",
    "DM-SELF": "optional self-loop transitions for edit and shared services",
}

ALL_RULES = {**OM_RULES, **DM_RULES}
