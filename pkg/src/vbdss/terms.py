"""RDF terms and triples.

Terms come in two kinds: IRIs and typed literals. Literal datatypes are
restricted to string, boolean, integer, and decimal; numeric and boolean
lexical forms are canonicalised at construction so that value-equal
literals compare equal (``Literal("03", INTEGER) == Literal("3", INTEGER)``).

Every distinct term is interned to a process-wide integer id. Graphs,
the rule engine, and the query engine all join on these integers; terms
are only materialised back at API boundaries.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from .errors import TripleError

STRING = "string"
BOOLEAN = "boolean"
INTEGER = "integer"
DECIMAL = "decimal"

DATATYPES = frozenset({STRING, BOOLEAN, INTEGER, DECIMAL})


@dataclass(frozen=True, slots=True)
class Iri:
    """An IRI (or a labelled blank node, kept verbatim as ``_:name``)."""

    value: str

    def __post_init__(self):
        if not self.value:
            raise TripleError("IRI term must have a non-empty identifier")

    def __str__(self) -> str:
        return f"<{self.value}>"


def _canonical_lexical(lexical: str, datatype: str) -> str:
    if datatype == STRING:
        return lexical
    if datatype == BOOLEAN:
        if lexical not in ("true", "false"):
            raise TripleError(f"invalid boolean lexical form {lexical!r}")
        return lexical
    if datatype == INTEGER:
        try:
            return str(int(lexical))
        except ValueError:
            raise TripleError(f"invalid integer lexical form {lexical!r}") from None
    if datatype == DECIMAL:
        try:
            value = Decimal(lexical)
        except InvalidOperation:
            raise TripleError(f"invalid decimal lexical form {lexical!r}") from None
        text = format(value, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        if text in ("-0", ""):
            text = "0"
        return text
    raise TripleError(f"unknown literal datatype {datatype!r}")


@dataclass(frozen=True, slots=True)
class Literal:
    """A typed literal; the stored lexical form is canonical for its datatype."""

    lexical: str
    datatype: str = STRING

    def __post_init__(self):
        object.__setattr__(self, "lexical", _canonical_lexical(self.lexical, self.datatype))

    @property
    def value(self):
        """The parsed Python value."""
        if self.datatype == BOOLEAN:
            return self.lexical == "true"
        if self.datatype == INTEGER:
            return int(self.lexical)
        if self.datatype == DECIMAL:
            return Decimal(self.lexical)
        return self.lexical

    def __str__(self) -> str:
        if self.datatype == STRING:
            return f'"{self.lexical}"'
        return self.lexical


Term = Iri | Literal

TRUE = Literal("true", BOOLEAN)
FALSE = Literal("false", BOOLEAN)


def integer(n: int) -> Literal:
    return Literal(str(n), INTEGER)


def string(s: str) -> Literal:
    return Literal(s, STRING)


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, Iri):
            raise TripleError(f"triple subject must be an IRI, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TripleError(f"triple predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, Literal)):
            raise TripleError(f"triple object must be a term, got {self.object!r}")

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object} ."


class TermTable:
    """Append-only bidirectional map between terms and integer ids.

    A single shared instance backs the whole process so ids are join-safe
    across graphs. Interning is locked; lookups on the id side are plain
    list reads and need no lock under the GIL.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._by_term: dict[Term, int] = {}
        self._by_id: list[Term] = []

    def intern(self, term: Term) -> int:
        tid = self._by_term.get(term)
        if tid is not None:
            return tid
        with self._lock:
            tid = self._by_term.get(term)
            if tid is None:
                tid = len(self._by_id)
                self._by_id.append(term)
                self._by_term[term] = tid
            return tid

    def term(self, tid: int) -> Term:
        return self._by_id[tid]

    def lookup(self, term: Term) -> int | None:
        """Id of an already-interned term, or None (never allocates)."""
        return self._by_term.get(term)

    def __len__(self) -> int:
        return len(self._by_id)


TERMS = TermTable()


def intern_term(term: Term) -> int:
    return TERMS.intern(term)


def term_of(tid: int) -> Term:
    return TERMS.term(tid)


def intern_triple(t: Triple) -> tuple[int, int, int]:
    return (TERMS.intern(t.subject), TERMS.intern(t.predicate), TERMS.intern(t.object))


def triple_of(ids: tuple[int, int, int]) -> Triple:
    s, p, o = ids
    return Triple(TERMS.term(s), TERMS.term(p), TERMS.term(o))


def sort_key(term: Term) -> tuple:
    """Deterministic total order over terms, used for stable rendering."""
    if isinstance(term, Iri):
        return (0, term.value, "")
    return (1, term.lexical, term.datatype)
