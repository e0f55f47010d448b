"""Horn rule parser and forward-chaining engine with provenance.

Rule surface syntax is the guideline-table style::

    rule t2r1: patient(?p) ^ has_Fever_WithChills(?p, true) -> has_SymptomOf_Malaria(?P, true)

One rule per line; ``#`` comments; the ``rule <id>:`` label is optional.
Atoms are class atoms ``C(?x)`` (arity 1), property atoms ``p(?x, v)``
(arity 2), and the equality builtin ``swrlb:equal(?v, "lit")``. Variables
match case-insensitively (the guideline text mixes ``?P``/``?p`` within one
rule); a rule that mixes spellings gets a lint warning but parses.

Evaluation is semi-naive (delta-driven) to a least fixpoint. A class atom
``C(?x)`` matches ``(?x, rdf:type, D)`` for any ``D`` at or below ``C`` in
the schema. String-literal comparison, both in ``swrlb:equal`` and for
direct string constants in body atoms, is case-insensitive unless
``strict_strings=True`` (the guideline tables spell result values
"positive"/"Negative" inconsistently; strict comparison would dead-code a
treatment rule). Head instantiations that would produce an ill-formed
triple (a literal in subject position) are discarded; the shipped corpus
never triggers this.

``naive_fixpoint`` is the reference evaluator: no indexes, no deltas, a
full rescan every round. It exists so tests can check the optimised
engine against an independent implementation; keep it boring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ._core import WILD, TripleIndex
from .errors import ParseError, RuleSafetyError, VbdError
from .ontology import OntologySchema
from .store import Graph, graph_from_ids
from .terms import (
    BOOLEAN,
    DECIMAL,
    INTEGER,
    STRING,
    Iri,
    Literal,
    Term,
    Triple,
    intern_term,
    term_of,
    triple_of,
)
from .vocab import RDF_TYPE, STANDARD_PREFIXES, SWRLB_EQUAL

CLASS = "class_atom"
PROPERTY = "property_atom"
BUILTIN = "builtin_atom"


@dataclass(frozen=True)
class Variable:
    name: str  # normalised (lowercase, no '?')

    def __str__(self) -> str:
        return f"?{self.name}"


Arg = Variable | Iri | Literal


@dataclass(frozen=True)
class Atom:
    kind: str
    predicate: str  # IRI, or the builtin IRI
    args: tuple[Arg, ...]

    def variables(self) -> set[str]:
        return {a.name for a in self.args if isinstance(a, Variable)}


@dataclass(frozen=True)
class Rule:
    id: str
    body: tuple[Atom, ...]
    head: tuple[Atom, ...]
    source: str = "user"  # table2 | table3 | table4 | prose | user
    text: str = ""
    note: str = ""
    display_names: tuple[tuple[str, str], ...] = ()  # normalised -> surface form
    warnings: tuple[str, ...] = ()

    def display(self, name: str) -> str:
        for norm, surface in self.display_names:
            if norm == name:
                return surface
        return f"?{name}"


# -- parsing -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<caret>\^)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>[+-]?\d+(?:\.\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_:.-]*)
    """,
    re.VERBOSE,
)

_RULE_LABEL_RE = re.compile(r"^rule\s+(?P<id>[A-Za-z0-9_.-]+)\s*:\s*(?P<rest>.*)$")


def _tokenize_rule(text: str, line_no: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r} in rule", line_no, pos + 1)
        pos = m.end()
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), m.start() + 1))
    tokens.append(("eof", "", pos + 1))
    return tokens


class _RuleLineParser:
    def __init__(self, text: str, line_no: int, prefixes: dict[str, str]):
        self.tokens = _tokenize_rule(text, line_no)
        self.i = 0
        self.line_no = line_no
        self.prefixes = prefixes
        self.surface: dict[str, str] = {}  # normalised var -> first surface form
        self.mixed_case: set[str] = set()

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[0]} {tok[1]!r}", self.line_no, tok[2])
        self.i += 1
        return tok

    def peek_kind(self) -> str:
        return self.tokens[self.i][0]

    def atoms(self) -> list[Atom]:
        out = [self.atom()]
        while self.peek_kind() == "caret":
            self.take()
            out.append(self.atom())
        return out

    def atom(self) -> Atom:
        kind, name, col = self.take("name")
        iri = self._resolve(name, col)
        self.take("lparen")
        args = [self.arg()]
        while self.peek_kind() == "comma":
            self.take()
            args.append(self.arg())
        self.take("rparen")
        if iri == SWRLB_EQUAL:
            if len(args) != 2:
                raise ParseError("swrlb:equal takes exactly 2 arguments", self.line_no, col)
            return Atom(BUILTIN, iri, tuple(args))
        if len(args) == 1:
            if isinstance(args[0], Literal):
                raise ParseError(f"class atom {name} cannot take a literal argument", self.line_no, col)
            return Atom(CLASS, iri, tuple(args))
        if len(args) == 2:
            if isinstance(args[0], Literal):
                raise ParseError(f"property atom {name} cannot take a literal subject", self.line_no, col)
            return Atom(PROPERTY, iri, tuple(args))
        raise ParseError(f"atom {name} has arity {len(args)}; only 1 or 2 supported", self.line_no, col)

    def arg(self) -> Arg:
        kind, value, col = self.take()
        if kind == "var":
            surface = value
            norm = value[1:].lower()
            seen = self.surface.get(norm)
            if seen is None:
                self.surface[norm] = surface
            elif seen != surface:
                self.mixed_case.add(norm)
            return Variable(norm)
        if kind == "string":
            return Literal(_unescape(value[1:-1]), STRING)
        if kind == "number":
            return Literal(value, DECIMAL if "." in value else INTEGER)
        if kind == "name":
            if value == "true" or value == "false":
                return Literal(value, BOOLEAN)
            return Iri(self._resolve(value, col))
        raise ParseError(f"expected an argument, found {kind} {value!r}", self.line_no, col)

    def _resolve(self, name: str, col: int) -> str:
        if ":" in name:
            prefix, _, local = name.partition(":")
            base = self.prefixes.get(prefix)
            if base is None:
                raise ParseError(f"undefined prefix {prefix + ':'!r}", self.line_no, col)
            return base + local
        return self.prefixes[""] + name


def _unescape(body: str) -> str:
    return (
        body.replace("\\\\", "\x00")
        .replace('\\"', '"')
        .replace("\\n", "\n")
        .replace("\\t", "\t")
        .replace("\x00", "\\")
    )


def _check_safety(rule_id: str, body: list[Atom], head: list[Atom], line_no: int) -> None:
    bound = set()
    for atom in body:
        if atom.kind != BUILTIN:
            bound |= atom.variables()
    for atom in head:
        if atom.kind == BUILTIN:
            raise ParseError("builtin atoms are not allowed in rule heads", line_no, 1)
        for var in sorted(atom.variables() - bound):
            raise RuleSafetyError(
                f"rule {rule_id}: head variable ?{var} is not bound by any non-builtin body atom",
                rule_id=rule_id,
                variable=var,
            )
    for atom in body:
        if atom.kind == BUILTIN and isinstance(atom.args[0], Variable):
            var = atom.args[0].name
            if var not in bound:
                raise RuleSafetyError(
                    f"rule {rule_id}: builtin argument ?{var} is not bound by any non-builtin body atom",
                    rule_id=rule_id,
                    variable=var,
                )


def parse_rules(
    text: str,
    *,
    source: str = "user",
    prefixes: dict[str, str] | None = None,
) -> list[Rule]:
    """Parse rule text (one rule per line) into safe Rule values.

    ``#`` comment lines directly above a rule become its note (prose rules
    carry their guideline citation this way). Rules without a ``rule <id>:``
    label get sequential ids ``<source>-<n>``.
    """
    table = dict(STANDARD_PREFIXES)
    if prefixes:
        table.update(prefixes)
    rules: list[Rule] = []
    pending_note: list[str] = []
    auto_n = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            pending_note = []
            continue
        if line.startswith("#"):
            pending_note.append(line.lstrip("#").strip())
            continue
        label = _RULE_LABEL_RE.match(line)
        if label:
            rule_id = label.group("id")
            body_text = label.group("rest")
        else:
            auto_n += 1
            rule_id = f"{source}-{auto_n}"
            body_text = line
        parser = _RuleLineParser(body_text, line_no, table)
        body = parser.atoms()
        parser.take("arrow")
        head = parser.atoms()
        parser.take("eof")
        if not body or not head:
            raise ParseError("rule must have a non-empty body and head", line_no, 1)
        _check_safety(rule_id, body, head, line_no)
        warnings = tuple(
            f"rule {rule_id}: variable ?{v} written with inconsistent case" for v in sorted(parser.mixed_case)
        )
        rules.append(
            Rule(
                id=rule_id,
                body=tuple(body),
                head=tuple(head),
                source=source,
                text=body_text,
                note=" ".join(pending_note),
                display_names=tuple(sorted(parser.surface.items())),
                warnings=warnings,
            )
        )
        pending_note = []
    seen_ids = set()
    for rule in rules:
        if rule.id in seen_ids:
            raise ParseError(f"duplicate rule id {rule.id!r}", 0, 0)
        seen_ids.add(rule.id)
    return rules


# -- inference results ----------------------------------------------------------


@dataclass(frozen=True)
class Provenance:
    rule_id: str
    bindings: dict[str, Term]  # surface variable name (with '?') -> bound term

    def as_dict(self) -> dict:
        return {"rule_id": self.rule_id, "bindings": {k: str(v) for k, v in self.bindings.items()}}


@dataclass
class DerivedFact:
    triple: Triple
    provenance: list[Provenance]


@dataclass(frozen=True)
class Violation:
    kind: str  # disjoint_membership | conflicting_boolean
    subject: str
    statements: tuple[Triple, Triple]

    def describe(self) -> str:
        a, b = self.statements
        return f"{self.kind}: {self.subject} via [{a}] and [{b}]"


@dataclass
class InferenceResult:
    base: Graph
    graph: Graph
    derived: list[DerivedFact]
    violations: list[Violation]
    rules_by_id: dict[str, Rule]

    def derived_triples(self) -> set[Triple]:
        return {d.triple for d in self.derived}


def explain(result: InferenceResult, fact: Triple) -> list[tuple[Rule, dict[str, Term]]]:
    """Every (rule, bindings) pair that derived the fact.

    Raises NotDerivedError for asserted or absent triples; the error says
    which of the two it was.
    """
    from .errors import NotDerivedError

    for d in result.derived:
        if d.triple == fact:
            return [(result.rules_by_id[p.rule_id], p.bindings) for p in d.provenance]
    if fact in result.base:
        raise NotDerivedError(f"triple is asserted, not derived: {fact}", asserted=True)
    raise NotDerivedError(f"triple is not present in the inference result: {fact}", asserted=False)


# -- the engine -------------------------------------------------------------------

_FULL, _DELTA, _OLD = 0, 1, 2


class _Engine:
    def __init__(self, graph: Graph, rules: list[Rule], schema: OntologySchema | None, strict: bool):
        self.rules = rules
        self.schema = schema
        self.strict = strict
        self.type_id = intern_term(Iri(RDF_TYPE))
        self.full = TripleIndex()
        self.base_ids = graph.triple_ids()
        for t in self.base_ids:
            self.full.add(*t)
        self.delta: set[tuple[int, int, int]] = set(self.base_ids)
        self.delta_idx = self._index_of(self.delta)
        # class IRI -> ids of the classes whose direct instances satisfy the atom
        self.class_ids: dict[str, list[int]] = {}
        for rule in rules:
            for atom in rule.body + rule.head:
                if atom.kind == CLASS and atom.predicate not in self.class_ids:
                    self.class_ids[atom.predicate] = self._subclass_ids(atom.predicate)
        # provenance accumulators, keyed by interned triple
        self.prov: dict[tuple[int, int, int], list[Provenance]] = {}
        self.prov_seen: set[tuple] = set()
        self.derived_order: list[tuple[int, int, int]] = []

    def _subclass_ids(self, class_iri: str) -> list[int]:
        if self.schema is not None and class_iri in self.schema.classes:
            subs = sorted(self.schema.subclasses_of(class_iri))
        else:
            subs = [class_iri]
        return [intern_term(Iri(c)) for c in subs]

    @staticmethod
    def _index_of(triples) -> TripleIndex:
        idx = TripleIndex()
        for t in triples:
            idx.add(*t)
        return idx

    # matching ---------------------------------------------------------------

    def _match_view(self, s: int, p: int, o: int, view: int):
        if view == _FULL:
            return self.full.match(s, p, o)
        if view == _DELTA:
            return self.delta_idx.match(s, p, o)
        return [t for t in self.full.match(s, p, o) if t not in self.delta]

    def _lenient_string(self, term_id: int) -> str | None:
        term = term_of(term_id)
        if isinstance(term, Literal) and term.datatype == STRING:
            return term.lexical.casefold()
        return None

    def _resolve_arg(self, arg: Arg, binding: dict[str, int]) -> int | None:
        """Interned id for a constant or bound variable; None if unbound."""
        if isinstance(arg, Variable):
            return binding.get(arg.name)
        return intern_term(arg)

    def _match_atom(self, atom: Atom, binding: dict[str, int], view: int):
        if atom.kind == CLASS:
            yield from self._match_class_atom(atom, binding, view)
        else:
            yield from self._match_property_atom(atom, binding, view)

    def _match_class_atom(self, atom: Atom, binding: dict[str, int], view: int):
        arg = atom.args[0]
        targets = self.class_ids[atom.predicate]
        bound = self._resolve_arg(arg, binding)
        if bound is not None:
            for cid in targets:
                if self._view_contains(bound, self.type_id, cid, view):
                    yield binding
                    return
            return
        assert isinstance(arg, Variable)
        seen: set[int] = set()
        for cid in targets:
            for s, _, _ in self._match_view(WILD, self.type_id, cid, view):
                if s not in seen:
                    seen.add(s)
                    new = dict(binding)
                    new[arg.name] = s
                    yield new

    def _view_contains(self, s: int, p: int, o: int, view: int) -> bool:
        if view == _FULL:
            return self.full.contains(s, p, o)
        if view == _DELTA:
            return self.delta_idx.contains(s, p, o)
        return self.full.contains(s, p, o) and (s, p, o) not in self.delta

    def _match_property_atom(self, atom: Atom, binding: dict[str, int], view: int):
        s_arg, o_arg = atom.args
        p_id = intern_term(Iri(atom.predicate))
        s_id = self._resolve_arg(s_arg, binding)
        o_id = self._resolve_arg(o_arg, binding)
        # case-insensitive matching for direct string constants (lenient mode)
        lenient_obj: str | None = None
        if not self.strict and isinstance(o_arg, Literal) and o_arg.datatype == STRING:
            lenient_obj = o_arg.lexical.casefold()
            o_id = None
        for s, _, o in self._match_view(s_id if s_id is not None else WILD, p_id, o_id if o_id is not None else WILD, view):
            if lenient_obj is not None and self._lenient_string(o) != lenient_obj:
                continue
            new = binding
            if s_id is None:
                assert isinstance(s_arg, Variable)
                new = dict(new)
                new[s_arg.name] = s
            if o_id is None and lenient_obj is None:
                assert isinstance(o_arg, Variable)
                if isinstance(s_arg, Variable) and s_arg.name == o_arg.name:
                    if s != o:
                        continue
                    yield new if new is not binding else dict(binding)
                    continue
                new = dict(new) if new is binding else new
                new[o_arg.name] = o
            yield new if new is not binding else dict(binding)

    def _eval_builtin(self, atom: Atom, binding: dict[str, int]) -> bool:
        left = self._resolve_arg(atom.args[0], binding)
        right = self._resolve_arg(atom.args[1], binding)
        if left is None or right is None:
            unbound = atom.args[0] if left is None else atom.args[1]
            raise VbdError(f"builtin argument {unbound} is unbound at evaluation time")
        if left == right:
            return True
        lt, rt = term_of(left), term_of(right)
        if (
            not self.strict
            and isinstance(lt, Literal)
            and isinstance(rt, Literal)
            and lt.datatype == STRING
            and rt.datatype == STRING
        ):
            return lt.lexical.casefold() == rt.lexical.casefold()
        return False

    # evaluation ---------------------------------------------------------------

    def _order_atoms(self, atoms: list[tuple[Atom, int]]) -> list[tuple[Atom, int]]:
        """Ascending estimated match count; estimates use constants only."""

        def estimate(entry) -> tuple[int, int]:
            atom, _ = entry
            if atom.kind == CLASS:
                total = sum(self.full.count(WILD, self.type_id, cid) for cid in self.class_ids[atom.predicate])
                return (total, 0)
            p_id = intern_term(Iri(atom.predicate))
            s_arg, o_arg = atom.args
            s = intern_term(s_arg) if isinstance(s_arg, Iri) else WILD
            o = intern_term(o_arg) if isinstance(o_arg, (Iri, Literal)) else WILD
            bound = int(s != WILD) + int(o != WILD)
            return (self.full.count(s, p_id, o), -bound)

        return sorted(atoms, key=estimate)

    def _rule_matches(self, rule: Rule, decomposition: int | None):
        """All bindings satisfying the rule body under the given delta split.

        decomposition None: every atom against the full graph (first round).
        decomposition i: atom i against the delta, atoms before i against
        full, atoms after i against old; enumerates each match exactly once
        across rounds.
        """
        graph_atoms = [a for a in rule.body if a.kind != BUILTIN]
        builtins = [a for a in rule.body if a.kind == BUILTIN]
        if not graph_atoms:
            # builtin-only body: satisfiable independent of the database,
            # so it fires (at most) in the first round
            if decomposition is None and all(self._eval_builtin(b, {}) for b in builtins):
                yield {}
            return
        if decomposition is None:
            tagged = [(a, _FULL) for a in graph_atoms]
            ordered = self._order_atoms(tagged)
        else:
            i = decomposition
            tagged = (
                [(a, _FULL) for a in graph_atoms[:i]]
                + [(graph_atoms[i], _DELTA)]
                + [(a, _OLD) for a in graph_atoms[i + 1 :]]
            )
            delta_entry = tagged[i]
            rest = self._order_atoms(tagged[:i] + tagged[i + 1 :])
            ordered = [delta_entry] + rest
        bindings: list[dict[str, int]] = [{}]
        for atom, view in ordered:
            next_bindings: list[dict[str, int]] = []
            for b in bindings:
                next_bindings.extend(self._match_atom(atom, b, view))
            bindings = next_bindings
            if not bindings:
                return
        for b in bindings:
            if all(self._eval_builtin(bi, b) for bi in builtins):
                yield b

    def _instantiate_head(self, atom: Atom, binding: dict[str, int]) -> tuple[int, int, int] | None:
        if atom.kind == CLASS:
            s = self._resolve_arg(atom.args[0], binding)
            cid = intern_term(Iri(atom.predicate))
            triple = (s, self.type_id, cid)
        else:
            s = self._resolve_arg(atom.args[0], binding)
            o = self._resolve_arg(atom.args[1], binding)
            triple = (s, intern_term(Iri(atom.predicate)), o)
        if not isinstance(term_of(triple[0]), Iri):
            return None  # ill-formed instantiation (literal subject); dropped
        return triple

    def _record(self, rule: Rule, binding: dict[str, int], triple: tuple[int, int, int]) -> bool:
        """Attach provenance; True iff the triple is new to the graph."""
        if triple in self.base_ids:
            return False  # asserted facts stay asserted; no provenance kept
        key = (triple, rule.id, tuple(sorted(binding.items())))
        if key not in self.prov_seen:
            self.prov_seen.add(key)
            display = {rule.display(name): term_of(tid) for name, tid in binding.items()}
            entry = Provenance(rule.id, display)
            if triple in self.prov:
                self.prov[triple].append(entry)
                return False
            self.prov[triple] = [entry]
            self.derived_order.append(triple)
            return True
        return False

    def run(self) -> tuple[set[tuple[int, int, int]], list[DerivedFact]]:
        first = True
        while self.delta:
            new: set[tuple[int, int, int]] = set()
            for rule in self.rules:
                n = len([a for a in rule.body if a.kind != BUILTIN])
                decomps = [None] if first else list(range(n))
                for d in decomps:
                    for binding in self._rule_matches(rule, d):
                        for head_atom in rule.head:
                            triple = self._instantiate_head(head_atom, binding)
                            if triple is None:
                                continue
                            self._record(rule, binding, triple)
                            if not self.full.contains(*triple):
                                new.add(triple)
            for t in new:
                self.full.add(*t)
            self.delta = new
            self.delta_idx = self._index_of(new)
            first = False
        facts = {t for t in self.full.triples()}
        derived = [DerivedFact(triple_of(t), self.prov[t]) for t in self.derived_order]
        return facts, derived


def apply_rules(
    graph: Graph,
    rules: list[Rule],
    schema: OntologySchema | None = None,
    *,
    strict_strings: bool = False,
) -> InferenceResult:
    """Forward-chain to the least fixpoint; pure in its inputs.

    Returns the result graph (input plus derivations), one DerivedFact per
    inferred triple carrying every distinct (rule, bindings) justification,
    and the consistency violations found on the final graph.
    """
    engine = _Engine(graph, rules, schema, strict_strings)
    facts, derived = engine.run()
    result_graph = graph_from_ids(facts)
    violations = check_consistency(result_graph, schema) if schema is not None else []
    return InferenceResult(
        base=graph.copy(),
        graph=result_graph,
        derived=derived,
        violations=violations,
        rules_by_id={r.id: r for r in rules},
    )


# -- consistency ---------------------------------------------------------------


def check_consistency(graph: Graph, schema: OntologySchema) -> list[Violation]:
    """Disjoint-class memberships and boolean contradictions in a graph."""
    violations: list[Violation] = []
    type_iri = Iri(RDF_TYPE)

    memberships: dict[str, set[str]] = {}
    for t in graph.match(None, type_iri, None):
        if isinstance(t.object, Iri):
            memberships.setdefault(t.subject.value, set()).add(t.object.value)

    def below(cls: str) -> set[str]:
        if cls in schema.classes:
            return schema.subclasses_of(cls)
        return {cls}

    for pair in sorted(schema.disjoint_pairs, key=sorted):
        a, b = sorted(pair)
        below_a, below_b = below(a), below(b)
        for ind in sorted(memberships):
            classes = memberships[ind]
            in_a = sorted(classes & below_a)
            in_b = sorted(classes & below_b)
            if in_a and in_b and (in_a != in_b or len(in_a) > 1):
                subject = Iri(ind)
                stmt_a = Triple(subject, type_iri, Iri(in_a[0]))
                first_b = next((c for c in in_b if c != in_a[0]), in_b[0])
                stmt_b = Triple(subject, type_iri, Iri(first_b))
                violations.append(Violation("disjoint_membership", ind, (stmt_a, stmt_b)))

    true_lit = Literal("true", BOOLEAN)
    false_lit = Literal("false", BOOLEAN)
    with_true = {(t.subject, t.predicate) for t in graph.match(None, None, true_lit)}
    with_false = {(t.subject, t.predicate) for t in graph.match(None, None, false_lit)}
    for s, p in sorted(with_true & with_false, key=lambda sp: (sp[0].value, sp[1].value)):
        violations.append(
            Violation(
                "conflicting_boolean",
                s.value,
                (Triple(s, p, true_lit), Triple(s, p, false_lit)),
            )
        )
    return violations


# -- reference evaluator (test oracle) -------------------------------------------


def naive_fixpoint(
    graph: Graph,
    rules: list[Rule],
    schema: OntologySchema | None = None,
    *,
    strict_strings: bool = False,
) -> set[Triple]:
    """Naive bottom-up evaluation: rescan everything until nothing changes.

    Deliberately index-free and delta-free so it shares no machinery with
    the optimised engine; used as the equivalence oracle in tests.
    """
    type_iri = Iri(RDF_TYPE)
    facts: set[Triple] = set(graph)

    def class_targets(iri: str) -> set[str]:
        if schema is not None and iri in schema.classes:
            return schema.subclasses_of(iri)
        return {iri}

    def resolve(arg: Arg, env: dict[str, Term]) -> Term | None:
        if isinstance(arg, Variable):
            return env.get(arg.name)
        return arg

    def str_eq(a: Term, b: Term) -> bool:
        if a == b:
            return True
        if strict_strings:
            return False
        return (
            isinstance(a, Literal)
            and isinstance(b, Literal)
            and a.datatype == STRING
            and b.datatype == STRING
            and a.lexical.casefold() == b.lexical.casefold()
        )

    def match_atoms(atoms: list[Atom], env: dict[str, Term]):
        if not atoms:
            yield env
            return
        atom, rest = atoms[0], atoms[1:]
        if atom.kind == BUILTIN:
            left = resolve(atom.args[0], env)
            right = resolve(atom.args[1], env)
            if left is None or right is None:
                raise VbdError(f"builtin argument unbound in naive evaluation of {atom}")
            if str_eq(left, right):
                yield from match_atoms(rest, env)
            return
        if atom.kind == CLASS:
            targets = class_targets(atom.predicate)
            want = resolve(atom.args[0], env)
            seen: set[Term] = set()
            for f in facts:
                if f.predicate != type_iri or not isinstance(f.object, Iri) or f.object.value not in targets:
                    continue
                if want is not None:
                    if f.subject == want and want not in seen:
                        seen.add(want)
                        yield from match_atoms(rest, env)
                elif f.subject not in seen:
                    seen.add(f.subject)
                    new_env = dict(env)
                    new_env[atom.args[0].name] = f.subject
                    yield from match_atoms(rest, new_env)
            return
        s_arg, o_arg = atom.args
        want_s = resolve(s_arg, env)
        want_o = resolve(o_arg, env)
        for f in facts:
            if f.predicate.value != atom.predicate:
                continue
            if want_s is not None and f.subject != want_s:
                continue
            if want_o is not None:
                if isinstance(o_arg, Literal) and o_arg.datatype == STRING:
                    if not str_eq(f.object, want_o):
                        continue
                elif f.object != want_o:
                    continue
            new_env = dict(env)
            if want_s is None:
                new_env[s_arg.name] = f.subject
            if want_o is None:
                if isinstance(o_arg, Variable) and isinstance(s_arg, Variable) and s_arg.name == o_arg.name:
                    if f.object != new_env[s_arg.name]:
                        continue
                else:
                    new_env[o_arg.name] = f.object
            yield from match_atoms(rest, new_env)

    def instantiate(atom: Atom, env: dict[str, Term]) -> Triple | None:
        if atom.kind == CLASS:
            subject = resolve(atom.args[0], env)
            if not isinstance(subject, Iri):
                return None
            return Triple(subject, type_iri, Iri(atom.predicate))
        subject = resolve(atom.args[0], env)
        obj = resolve(atom.args[1], env)
        if not isinstance(subject, Iri):
            return None
        return Triple(subject, Iri(atom.predicate), obj)

    changed = True
    while changed:
        changed = False
        for rule in rules:
            body = sorted(rule.body, key=lambda a: a.kind == BUILTIN)  # builtins last
            for env in list(match_atoms(list(body), {})):
                for head_atom in rule.head:
                    t = instantiate(head_atom, env)
                    if t is not None and t not in facts:
                        facts.add(t)
                        changed = True
    return facts
