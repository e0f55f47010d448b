"""Basic-graph-pattern queries.

Surface syntax is a small SELECT subset::

    PREFIX : <http://example.org/vbd#>
    SELECT ?p ?v
    WHERE { ?p a :patient . ?p :has_ME_Result ?v }
    FILTER(?v = "positive")

Patterns are joined naturally (left-deep, most selective first), filters
are equality/inequality tests between a variable and a constant or another
variable, and the projected rows are deduplicated (set semantics).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ._core import WILD
from .errors import ParseError
from .store import Graph
from .terms import BOOLEAN, DECIMAL, INTEGER, STRING, Iri, Literal, Term, intern_term, sort_key, term_of
from .vocab import RDF_TYPE, STANDARD_PREFIXES


@dataclass(frozen=True)
class QueryVar:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternSlot = QueryVar | Iri | Literal


@dataclass(frozen=True)
class Filter:
    left: QueryVar
    op: str  # "=" or "!="
    right: PatternSlot


@dataclass
class Query:
    select_vars: list[str]
    patterns: list[tuple[PatternSlot, PatternSlot, PatternSlot]]
    filters: list[Filter] = field(default_factory=list)
    text: str = ""


@dataclass
class SolutionTable:
    header: list[str]
    rows: list[tuple[Term, ...]]  # aligned with header; duplicate-free, sorted

    def __len__(self) -> int:
        return len(self.rows)

    def as_dicts(self) -> list[dict[str, Term]]:
        return [dict(zip(self.header, row)) for row in self.rows]


# -- parser --------------------------------------------------------------------


class _QueryLexer:
    _PUNCT = {"{": "lbrace", "}": "rbrace", ".": "dot", "(": "lparen", ")": "rparen"}

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def tokens(self) -> list[tuple[str, str, int, int]]:
        out = []
        while True:
            while self.pos < len(self.text) and (self.text[self.pos].isspace() or self.text[self.pos] == "#"):
                if self.text[self.pos] == "#":
                    while self.pos < len(self.text) and self.text[self.pos] != "\n":
                        self._advance()
                else:
                    self._advance()
            if self.pos >= len(self.text):
                out.append(("eof", "", self.line, self.col))
                return out
            line, col = self.line, self.col
            c = self.text[self.pos]
            if c in self._PUNCT:
                self._advance()
                out.append((self._PUNCT[c], c, line, col))
            elif c in ("=", "!"):
                if self.text[self.pos : self.pos + 2] == "!=":
                    self._advance(2)
                    out.append(("op", "!=", line, col))
                elif c == "=":
                    self._advance()
                    out.append(("op", "=", line, col))
                else:
                    raise ParseError("expected '!=' operator", line, col)
            elif c == "?":
                self._advance()
                start = self.pos
                while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                    self._advance()
                name = self.text[start : self.pos]
                if not name:
                    raise ParseError("variable name expected after '?'", line, col)
                out.append(("var", name, line, col))
            elif c == "<":
                self._advance()
                start = self.pos
                while self.pos < len(self.text) and self.text[self.pos] != ">":
                    self._advance()
                if self.pos >= len(self.text):
                    raise ParseError("unterminated IRI reference", line, col)
                value = self.text[start : self.pos]
                self._advance()
                out.append(("iriref", value, line, col))
            elif c == '"':
                self._advance()
                chars = []
                while True:
                    if self.pos >= len(self.text) or self.text[self.pos] == "\n":
                        raise ParseError("unterminated string literal", line, col)
                    ch = self.text[self.pos]
                    if ch == '"':
                        self._advance()
                        break
                    if ch == "\\":
                        self._advance()
                        esc = self.text[self.pos] if self.pos < len(self.text) else ""
                        mapped = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc)
                        if mapped is None:
                            raise ParseError(f"unsupported escape \\{esc}", self.line, self.col)
                        chars.append(mapped)
                        self._advance()
                    else:
                        chars.append(ch)
                        self._advance()
                out.append(("string", "".join(chars), line, col))
            elif c.isdigit() or (c in "+-" and self.text[self.pos + 1 : self.pos + 2].isdigit()):
                start = self.pos
                self._advance()
                while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
                    self._advance()
                out.append(("number", self.text[start : self.pos], line, col))
            else:
                start = self.pos
                while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_:-"):
                    self._advance()
                word = self.text[start : self.pos]
                if not word:
                    raise ParseError(f"unexpected character {c!r}", line, col)
                out.append(("word", word, line, col))


class _QueryParser:
    def __init__(self, text: str, prefixes: dict[str, str]):
        self.tokens = _QueryLexer(text).tokens()
        self.i = 0
        self.prefixes = dict(prefixes)
        self.text = text

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str | None = None, value: str | None = None):
        tok = self.tokens[self.i]
        if (kind is not None and tok[0] != kind) or (value is not None and tok[1].upper() != value):
            want = value or kind
            raise ParseError(f"expected {want}, found {tok[1]!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def parse(self) -> Query:
        while self.peek()[0] == "word" and self.peek()[1].upper() == "PREFIX":
            self.take()
            label_tok = self.take("word")
            label = label_tok[1]
            if not label.endswith(":"):
                raise ParseError("prefix label must end with ':'", label_tok[2], label_tok[3])
            base = self.take("iriref")[1]
            self.prefixes[label[:-1]] = base
        self.take("word", "SELECT")
        select_vars = []
        while self.peek()[0] == "var":
            select_vars.append(self.take()[1])
        if not select_vars:
            tok = self.peek()
            raise ParseError("SELECT needs at least one variable", tok[2], tok[3])
        self.take("word", "WHERE")
        self.take("lbrace")
        patterns = [self._pattern()]
        while self.peek()[0] == "dot":
            self.take()
            if self.peek()[0] == "rbrace":
                break
            patterns.append(self._pattern())
        self.take("rbrace")
        filters = []
        while self.peek()[0] == "word" and self.peek()[1].upper() == "FILTER":
            self.take()
            filters.append(self._filter())
        self.take("eof")

        pattern_vars = {slot.name for pat in patterns for slot in pat if isinstance(slot, QueryVar)}
        for name in select_vars:
            if name not in pattern_vars:
                raise ParseError(f"SELECT variable ?{name} is not bound by any pattern", 1, 1)
        for f in filters:
            unbound = {v.name for v in (f.left, f.right) if isinstance(v, QueryVar)} - pattern_vars
            if unbound:
                raise ParseError(f"FILTER variable ?{sorted(unbound)[0]} is not bound by any pattern", 1, 1)
        return Query(select_vars, patterns, filters, text=self.text)

    def _pattern(self):
        s = self._slot(subject=True)
        p = self._slot(predicate=True)
        o = self._slot()
        return (s, p, o)

    def _slot(self, subject: bool = False, predicate: bool = False) -> PatternSlot:
        kind, value, line, col = self.take()
        if kind == "var":
            return QueryVar(value)
        if kind == "iriref":
            return Iri(value)
        if kind == "string":
            if subject or predicate:
                raise ParseError("literal not allowed in subject/predicate position", line, col)
            return Literal(value, STRING)
        if kind == "number":
            if subject or predicate:
                raise ParseError("literal not allowed in subject/predicate position", line, col)
            return Literal(value, DECIMAL if "." in value else INTEGER)
        if kind == "word":
            if value == "a" and predicate:
                return Iri(RDF_TYPE)
            if value in ("true", "false"):
                if subject or predicate:
                    raise ParseError("literal not allowed in subject/predicate position", line, col)
                return Literal(value, BOOLEAN)
            if ":" in value:
                prefix, _, local = value.partition(":")
                base = self.prefixes.get(prefix)
                if base is None:
                    raise ParseError(f"undefined prefix {prefix + ':'!r}", line, col)
                return Iri(base + local)
        raise ParseError(f"expected a term or variable, found {value!r}", line, col)

    def _filter(self) -> Filter:
        self.take("lparen")
        tok = self.take("var")
        left = QueryVar(tok[1])
        op = self.take("op")[1]
        right = self._slot()
        self.take("rparen")
        return Filter(left, op, right)


def parse_query(text: str, prefixes: dict[str, str] | None = None) -> Query:
    table = dict(STANDARD_PREFIXES)
    if prefixes:
        table.update(prefixes)
    return _QueryParser(text, table).parse()


# -- execution -----------------------------------------------------------------


# bindings probed per candidate pattern when planning the join order
_PLAN_SAMPLE = 64


def execute(query: Query, graph: Graph) -> SolutionTable:
    """All variable assignments satisfying every pattern and filter,
    projected to the SELECT variables and deduplicated.

    Join order is planned greedily per step: each remaining pattern's
    extension cost is observed by counting index matches under a sample
    of the current bindings, and the cheapest pattern runs next. The
    planning probes are a per-run cost independent of how often the
    query is repeated, which is what makes one combined-graph run
    cheaper than per-dataset runs of the same query.
    """
    bindings: list[dict[str, int]] = [{}]
    remaining = list(query.patterns)
    while remaining and bindings:
        pattern = _cheapest_pattern(remaining, bindings, graph)
        remaining.remove(pattern)
        next_bindings: list[dict[str, int]] = []
        for b in bindings:
            next_bindings.extend(_match_pattern(pattern, b, graph))
        bindings = next_bindings
    if remaining:
        bindings = []
    rows: set[tuple[int, ...]] = set()
    for b in bindings:
        if all(_eval_filter(f, b) for f in query.filters):
            rows.add(tuple(b[name] for name in query.select_vars))
    materialised = [tuple(term_of(tid) for tid in row) for row in rows]
    materialised.sort(key=lambda row: tuple(sort_key(t) for t in row))
    return SolutionTable(list(query.select_vars), materialised)


def _cheapest_pattern(remaining, bindings, graph: Graph):
    """The remaining pattern with the lowest observed extension cost.

    Cost is the number of index matches summed over a bounded sample of
    current bindings (extrapolated to the full binding set), with bound
    positions preferred over wildcards on ties.
    """
    if len(remaining) == 1:
        return remaining[0]
    sample = bindings[:_PLAN_SAMPLE]
    scale = len(bindings) / len(sample)
    best = None
    best_key = None
    for pattern in remaining:
        observed = 0
        for b in sample:
            observed += graph.count_ids(*_encode(pattern, b))
        wildcards = sum(1 for slot in pattern if isinstance(slot, QueryVar))
        key = (observed * scale, wildcards)
        if best_key is None or key < best_key:
            best, best_key = pattern, key
    return best


def _encode(pattern, binding: dict[str, int]):
    out = []
    for slot in pattern:
        if isinstance(slot, QueryVar):
            out.append(binding.get(slot.name, WILD))
        else:
            out.append(intern_term(slot))
    return tuple(out)


def _match_pattern(pattern, binding: dict[str, int], graph: Graph):
    s_slot, p_slot, o_slot = pattern
    ids = _encode(pattern, binding)
    for s, p, o in graph.match_ids(*ids):
        new = dict(binding)
        ok = True
        for slot, value in ((s_slot, s), (p_slot, p), (o_slot, o)):
            if isinstance(slot, QueryVar):
                existing = new.get(slot.name)
                if existing is None:
                    new[slot.name] = value
                elif existing != value:
                    ok = False
                    break
        if ok:
            yield new


def _eval_filter(f: Filter, binding: dict[str, int]) -> bool:
    left = binding[f.left.name]
    right = binding[f.right.name] if isinstance(f.right, QueryVar) else intern_term(f.right)
    return (left == right) if f.op == "=" else (left != right)
