"""Exception types shared across the package.

Every error that can surface through the CLI or HTTP API carries a stable
machine-readable ``code`` so callers can dispatch without parsing messages.
"""

from __future__ import annotations


class VbdError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str, *, detail: object = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


class TripleError(VbdError):
    """Malformed triple (e.g. literal in subject or predicate position)."""

    code = "malformed_triple"


class ParseError(VbdError):
    """Lexical or syntactic error in Turtle, rule, or query text."""

    code = "parse_error"

    def __init__(self, message: str, line: int, column: int, *, source: str | None = None):
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.source = source
        self.bare_message = message


class RuleSafetyError(VbdError):
    """Rule head or builtin uses a variable not bound by a body atom."""

    code = "unsafe_rule"

    def __init__(self, message: str, *, rule_id: str | None = None, variable: str | None = None):
        super().__init__(message)
        self.rule_id = rule_id
        self.variable = variable


class SchemaError(VbdError):
    """Ontology schema violation (subclass cycle, missing BFO roots)."""

    code = "schema_error"


class UnknownClassError(SchemaError):
    code = "unknown_class"


class UndefinedMetricError(VbdError):
    """Metric denominator is zero for the given counts."""

    code = "undefined_metric"


class NotDerivedError(VbdError):
    """explain() was asked about a triple that is not a derived fact."""

    code = "not_derived"

    def __init__(self, message: str, *, asserted: bool):
        super().__init__(message)
        # True: the triple exists but was asserted, not inferred.
        # False: the triple is absent from the result graph entirely.
        self.asserted = asserted


class UnknownPredicateError(VbdError):
    """Assertion used a predicate the KB schema does not declare."""

    code = "unknown_predicate"

    def __init__(self, message: str, *, suggestions: list[str] | None = None):
        super().__init__(message, detail=suggestions or [])
        self.suggestions = suggestions or []


class KbLoadError(VbdError):
    """Knowledge-base directory failed validation."""

    code = "kb_load_error"

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class CaseError(VbdError):
    code = "case_error"


class DuplicateCaseError(CaseError):
    code = "duplicate_case"


class CaseNotFoundError(CaseError):
    code = "case_not_found"


class CorruptLogError(CaseError):
    code = "corrupt_case_log"

    def __init__(self, message: str, *, seq: int | None = None):
        super().__init__(message)
        self.seq = seq
