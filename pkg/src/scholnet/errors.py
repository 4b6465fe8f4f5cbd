"""Exception hierarchy shared by all pipeline stages.

Every error carries a stable ``code`` so the CLI can print a single
machine-parseable line and map it to an exit status.
"""

from __future__ import annotations


class ScholnetError(Exception):
    code = "ERROR"
    exit_status = 2


class InputError(ScholnetError):
    """Bad records, registry rows or other input data."""

    code = "INPUT_ERROR"
    exit_status = 2


class ConfigError(ScholnetError):
    code = "CONFIG_ERROR"
    exit_status = 3


class InvariantViolation(ScholnetError):
    code = "INVARIANT_VIOLATION"
    exit_status = 4


class MalformedLine(InputError):
    code = "MALFORMED_LINE"

    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: malformed JSON{': ' + reason if reason else ''}")


class SchemaViolation(InputError):
    code = "SCHEMA_VIOLATION"

    def __init__(self, line_no: int, field: str, reason: str = ""):
        self.line_no = line_no
        self.field = field
        msg = f"line {line_no}: bad field {field!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class DuplicatePaperId(InputError):
    code = "DUPLICATE_PAPER_ID"

    def __init__(self, paper_id: str):
        self.paper_id = paper_id
        super().__init__(f"duplicate paper_id {paper_id!r}")


class EmptyCorpus(InputError):
    code = "EMPTY_CORPUS"

    def __init__(self):
        super().__init__("corpus contains no records")


class EmptyAfterNormalization(InputError):
    code = "EMPTY_AFTER_NORMALIZATION"

    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"affiliation {raw!r} is empty after normalization")


class AliasTargetMissing(InputError):
    code = "ALIAS_TARGET_MISSING"

    def __init__(self, canonical_id: str):
        self.canonical_id = canonical_id
        super().__init__(f"alias points to unknown canonical id {canonical_id!r}")


class UnknownInstitution(InputError):
    code = "UNKNOWN_INSTITUTION"

    def __init__(self, canonical_id: str):
        self.canonical_id = canonical_id
        super().__init__(f"unknown institution {canonical_id!r}")


class UnresolvedAffiliation(InputError):
    code = "UNRESOLVED_AFFILIATION"

    def __init__(self, raw: str):
        self.raw = raw
        super().__init__(f"affiliation {raw!r} has no resolution")


class NegativeDistance(InputError):
    code = "NEGATIVE_DISTANCE"

    def __init__(self, km: float):
        self.km = km
        super().__init__(f"negative distance {km!r} km")


class ZeroProductivity(InputError):
    code = "ZERO_PRODUCTIVITY"

    def __init__(self, node: str):
        self.node = node
        super().__init__(f"institution {node!r} has no papers")


class NoLocatedPairs(InputError):
    code = "NO_LOCATED_PAIRS"

    def __init__(self):
        super().__init__("no collaborating pair has both endpoints located")


class EmptyGraph(InputError):
    code = "EMPTY_GRAPH"

    def __init__(self):
        super().__init__("graph has no nodes")
