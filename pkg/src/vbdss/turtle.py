"""Turtle subset parser and serializer.

The supported grammar is the repo's canonical KB exchange format:

* ``@prefix label: <iri> .`` declarations
* prefixed names (``:patient1``, ``rdfs:subClassOf``), absolute ``<iri>``,
  labelled blank nodes ``_:b1``, and the ``a`` keyword for rdf:type
* string literals with ``\\" \\\\ \\n \\r \\t`` escapes, bare ``true``/``false``
  booleans, bare integer and decimal tokens
* ``;`` and ``,`` abbreviations, ``#`` comments

Anything else (anonymous ``[...]`` nodes, collections, multi-line strings,
language tags) is rejected with a position-carrying ParseError. The
serializer emits documents that re-parse to an equal triple set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, TripleError
from .store import Graph
from .terms import BOOLEAN, DECIMAL, INTEGER, STRING, Iri, Literal, Term, Triple, sort_key
from .vocab import RDF_TYPE


@dataclass
class PrefixTable:
    """Prefix label -> IRI base. Labels are unique by construction (dict)."""

    prefixes: dict[str, str] = field(default_factory=dict)

    def bind(self, label: str, base: str) -> None:
        self.prefixes[label] = base

    def expand(self, label: str, local: str) -> str:
        if label not in self.prefixes:
            raise KeyError(label)
        return self.prefixes[label] + local

    def shrink(self, iri: str) -> str | None:
        """Best prefixed form for an IRI, or None if no prefix applies."""
        best: tuple[int, str] | None = None
        for label, base in self.prefixes.items():
            if iri.startswith(base) and len(base) > (best[0] if best else -1):
                local = iri[len(base):]
                if _valid_local(local):
                    best = (len(base), f"{label}:{local}")
        return best[1] if best else None

    def copy(self) -> "PrefixTable":
        return PrefixTable(dict(self.prefixes))


def _valid_local(local: str) -> bool:
    if local == "":
        return True
    if not (local[0].isalnum() or local[0] == "_"):
        return False
    return all(c.isalnum() or c in "_-" for c in local)


# -- lexer --------------------------------------------------------------------

_PUNCT = {".": "dot", ";": "semi", ",": "comma"}


@dataclass(frozen=True)
class _Token:
    kind: str  # iriref | pname | blank | string | number | boolean | a | prefix | dot | semi | comma | eof
    value: str
    line: int
    column: int


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _skip_ws_and_comments(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance()
            elif c == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def tokens(self) -> list[_Token]:
        out = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "eof":
                return out

    def _next(self) -> _Token:
        self._skip_ws_and_comments()
        if self.pos >= len(self.text):
            return _Token("eof", "", self.line, self.col)
        line, col = self.line, self.col
        c = self.text[self.pos]
        if c in _PUNCT:
            self._advance()
            return _Token(_PUNCT[c], c, line, col)
        if c == "<":
            return self._iriref(line, col)
        if c == '"':
            return self._string(line, col)
        if c.isdigit() or (c in "+-" and self._peek_digit()):
            return self._number(line, col)
        if c == "_" and self.text[self.pos : self.pos + 2] == "_:":
            return self._blank(line, col)
        if c == "@":
            word = self._word()
            if word == "@prefix":
                return _Token("prefix", word, line, col)
            raise ParseError(f"unsupported directive {word!r}", line, col)
        return self._name(line, col)

    def _peek_digit(self) -> bool:
        nxt = self.text[self.pos + 1 : self.pos + 2]
        return nxt.isdigit() or nxt == "."

    def _word(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and not self.text[self.pos].isspace():
            self._advance()
        return self.text[start : self.pos]

    def _iriref(self, line, col) -> _Token:
        self._advance()  # <
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] != ">":
            if self.text[self.pos] in " \n\t":
                raise ParseError("whitespace inside IRI reference", line, col)
            self._advance()
        if self.pos >= len(self.text):
            raise ParseError("unterminated IRI reference", line, col)
        value = self.text[start : self.pos]
        self._advance()  # >
        return _Token("iriref", value, line, col)

    def _string(self, line, col) -> _Token:
        self._advance()  # opening quote
        out = []
        while True:
            if self.pos >= len(self.text) or self.text[self.pos] == "\n":
                raise ParseError("unterminated string literal", line, col)
            c = self.text[self.pos]
            if c == '"':
                self._advance()
                return _Token("string", "".join(out), line, col)
            if c == "\\":
                self._advance()
                if self.pos >= len(self.text):
                    raise ParseError("unterminated escape sequence", line, col)
                esc = self.text[self.pos]
                mapped = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}.get(esc)
                if mapped is None:
                    raise ParseError(f"unsupported escape \\{esc}", self.line, self.col)
                out.append(mapped)
                self._advance()
            else:
                out.append(c)
                self._advance()

    def _number(self, line, col) -> _Token:
        start = self.pos
        if self.text[self.pos] in "+-":
            self._advance()
        seen_dot = False
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isdigit():
                self._advance()
            elif c == "." and not seen_dot and self.text[self.pos + 1 : self.pos + 2].isdigit():
                # a dot not followed by a digit is the statement terminator
                seen_dot = True
                self._advance()
            else:
                break
        return _Token("number", self.text[start : self.pos], line, col)

    def _blank(self, line, col) -> _Token:
        self._advance(2)  # _:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-"):
            self._advance()
        label = self.text[start : self.pos]
        if not label:
            raise ParseError("blank node label expected after '_:'", line, col)
        return _Token("blank", "_:" + label, line, col)

    def _name(self, line, col) -> _Token:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-:"):
            self._advance()
        word = self.text[start : self.pos]
        if not word:
            raise ParseError(f"unexpected character {self.text[self.pos]!r}", line, col)
        if word == "a":
            return _Token("a", word, line, col)
        if word in ("true", "false"):
            return _Token("boolean", word, line, col)
        if ":" not in word:
            raise ParseError(f"bare name {word!r} is not valid here (missing prefix?)", line, col)
        return _Token("pname", word, line, col)


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, prefixes: PrefixTable | None = None):
        self.tokens = _Lexer(text).tokens()
        self.i = 0
        self.table = prefixes.copy() if prefixes else PrefixTable()
        self.graph = Graph()

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self, kind: str | None = None) -> _Token:
        tok = self.tokens[self.i]
        if kind is not None and tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.kind} {tok.value!r}", tok.line, tok.column)
        self.i += 1
        return tok

    def parse(self) -> tuple[Graph, PrefixTable]:
        while self.peek().kind != "eof":
            if self.peek().kind == "prefix":
                self._prefix_decl()
            else:
                self._triples_block()
        return self.graph, self.table

    def _prefix_decl(self) -> None:
        self.take("prefix")
        tok = self.take("pname")
        if not tok.value.endswith(":") or tok.value.count(":") != 1:
            raise ParseError(f"prefix label {tok.value!r} must end with a single ':'", tok.line, tok.column)
        label = tok.value[:-1]
        base = self.take("iriref").value
        self.take("dot")
        self.table.bind(label, base)

    def _triples_block(self) -> None:
        subject = self._subject()
        while True:
            predicate = self._predicate()
            while True:
                obj = self._object()
                try:
                    self.graph.insert(Triple(subject, predicate, obj))
                except TripleError as exc:
                    tok = self.tokens[self.i - 1]
                    raise ParseError(str(exc), tok.line, tok.column) from exc
                if self.peek().kind == "comma":
                    self.take()
                    continue
                break
            if self.peek().kind == "semi":
                self.take()
                if self.peek().kind == "dot":  # tolerate trailing ';'
                    break
                continue
            break
        self.take("dot")

    def _subject(self) -> Iri:
        tok = self.peek()
        term = self._term()
        if not isinstance(term, Iri):
            raise ParseError("subject must be an IRI or blank node", tok.line, tok.column)
        return term

    def _predicate(self) -> Iri:
        tok = self.peek()
        if tok.kind == "a":
            self.take()
            return Iri(RDF_TYPE)
        term = self._term()
        if not isinstance(term, Iri):
            raise ParseError("predicate must be an IRI", tok.line, tok.column)
        return term

    def _object(self) -> Term:
        return self._term(allow_literal=True)

    def _term(self, allow_literal: bool = False) -> Term:
        tok = self.take()
        if tok.kind == "iriref":
            return Iri(tok.value)
        if tok.kind == "blank":
            return Iri(tok.value)
        if tok.kind == "pname":
            label, _, local = tok.value.partition(":")
            try:
                return Iri(self.table.expand(label, local))
            except KeyError:
                raise ParseError(f"undefined prefix {label + ':'!r}", tok.line, tok.column) from None
        if not allow_literal:
            raise ParseError(f"expected an IRI, found {tok.kind} {tok.value!r}", tok.line, tok.column)
        if tok.kind == "string":
            return Literal(tok.value, STRING)
        if tok.kind == "boolean":
            return Literal(tok.value, BOOLEAN)
        if tok.kind == "number":
            datatype = DECIMAL if "." in tok.value else INTEGER
            return Literal(tok.value, datatype)
        raise ParseError(f"expected a term, found {tok.kind} {tok.value!r}", tok.line, tok.column)


def parse_turtle(text: str, prefixes: PrefixTable | None = None) -> tuple[Graph, PrefixTable]:
    """Parse a Turtle document; returns the graph and the prefixes in force.

    ``prefixes`` seeds the table (the document's own @prefix lines override).
    """
    return _Parser(text, prefixes).parse()


# -- serializer ---------------------------------------------------------------


def _render_term(term: Term, table: PrefixTable) -> str:
    if isinstance(term, Iri):
        if term.value.startswith("_:"):
            return term.value
        short = table.shrink(term.value)
        return short if short is not None else f"<{term.value}>"
    if term.datatype == STRING:
        escaped = (
            term.lexical.replace("\\", "\\\\")
            .replace('"', '\\"')
            .replace("\n", "\\n")
            .replace("\r", "\\r")
            .replace("\t", "\\t")
        )
        return f'"{escaped}"'
    if term.datatype == DECIMAL and "." not in term.lexical:
        return term.lexical + ".0"  # keep the decimal datatype on re-parse
    return term.lexical


def serialize_turtle(graph: Graph, prefixes: PrefixTable | None = None) -> str:
    """Render a graph; output re-parses to an equal triple set."""
    table = prefixes.copy() if prefixes else PrefixTable()
    lines = [f"@prefix {label}: <{base}> ." for label, base in sorted(table.prefixes.items())]
    if lines:
        lines.append("")

    by_subject: dict[Iri, list[Triple]] = {}
    for t in graph:
        by_subject.setdefault(t.subject, []).append(t)

    for subject in sorted(by_subject, key=sort_key):
        triples = by_subject[subject]
        by_pred: dict[Iri, list[Term]] = {}
        for t in triples:
            by_pred.setdefault(t.predicate, []).append(t.object)
        parts = []
        for pred in sorted(by_pred, key=sort_key):
            pred_text = "a" if pred.value == RDF_TYPE else _render_term(pred, table)
            objects = ", ".join(_render_term(o, table) for o in sorted(by_pred[pred], key=sort_key))
            parts.append(f"{pred_text} {objects}")
        head = _render_term(subject, table)
        lines.append(f"{head} " + " ;\n    ".join(parts) + " .")
    return "\n".join(lines) + "\n"
