import random

import pytest

from vbdss.errors import NotDerivedError, ParseError, RuleSafetyError, VbdError
from vbdss.ontology import build_schema
from vbdss.rules import (
    BUILTIN,
    CLASS,
    PROPERTY,
    apply_rules,
    check_consistency,
    explain,
    naive_fixpoint,
    parse_rules,
)
from vbdss.store import Graph
from vbdss.terms import BOOLEAN, Iri, Literal, Triple
from vbdss.turtle import parse_turtle
from vbdss.vocab import RDF_TYPE, VBD_NS

V = VBD_NS
PREFIXES = (
    "@prefix : <http://example.org/vbd#> .\n"
    "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
    "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
)


def graph_of(doc: str) -> Graph:
    g, _ = parse_turtle(PREFIXES + doc)
    return g


# -- parsing -------------------------------------------------------------------


def test_parse_table_style_rule():
    (rule,) = parse_rules(
        "patient(?p) ^ has_Fever_WithChills(?p, true) ^ has_Headache(?p, true)"
        " ^has_Nausea(?p, true) -> has_SymptomOf_Malaria(?P, true)"
    )
    kinds = [a.kind for a in rule.body]
    assert kinds == [CLASS, PROPERTY, PROPERTY, PROPERTY]
    assert len(rule.head) == 1
    assert rule.head[0].predicate == V + "has_SymptomOf_Malaria"
    assert rule.warnings  # ?p vs ?P mixed case lint


def test_parse_builtin_and_string_constant():
    (rule,) = parse_rules('p(?x) ^ r(?x, ?v) ^ swrlb:equal(?v, "positive") -> q(?x, true)')
    assert rule.body[2].kind == BUILTIN
    assert rule.body[2].args[1] == Literal("positive")


def test_parse_tolerates_space_before_paren_and_hyphen_names():
    (rule,) = parse_rules("ACT-AL(?al) -> is_Prescribed_For_Duration (?al, 3)")
    assert rule.body[0].predicate == V + "ACT-AL"
    assert rule.head[0].args[1] == Literal("3", "integer")


def test_unsafe_rule_names_the_variable():
    with pytest.raises(RuleSafetyError) as err:
        parse_rules("p(?x) -> q(?y, true)")
    assert err.value.variable == "y"


def test_builtin_first_arg_must_be_bound():
    with pytest.raises(RuleSafetyError):
        parse_rules('p(?x) ^ swrlb:equal(?v, "a") -> q(?x, true)')


def test_builtin_not_allowed_in_head():
    with pytest.raises(ParseError):
        parse_rules('p(?x) -> swrlb:equal(?x, "a")')


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as err:
        parse_rules("p(?x ^ q(?x) -> r(?x, true)")
    assert err.value.line == 1


def test_rule_ids_and_notes():
    rules = parse_rules(
        "# basis: some guideline sentence\nrule myid: p(?x) -> q(?x, true)\np(?x) -> r(?x, true)\n",
        source="prose",
    )
    assert rules[0].id == "myid"
    assert rules[0].note.startswith("basis:")
    assert rules[1].id == "prose-1"
    assert all(r.source == "prose" for r in rules)


def test_duplicate_rule_ids_rejected():
    with pytest.raises(ParseError):
        parse_rules("rule a: p(?x) -> q(?x, true)\nrule a: p(?x) -> r(?x, true)")


# -- engine semantics ------------------------------------------------------------


def test_no_matching_bodies_changes_nothing():
    rules = parse_rules("p(?x) ^ q(?x, true) -> r(?x, true)")
    g = graph_of(":a :unrelated :b .")
    res = apply_rules(g, rules)
    assert res.derived == []
    assert set(res.graph) == set(g)


def test_class_atom_uses_subclass_inference():
    schema = build_schema(graph_of(":sub rdfs:subClassOf :top ."))
    rules = parse_rules("top(?x) -> flagged(?x, true)")
    g = graph_of(":i a :sub .")
    res = apply_rules(g, rules, schema)
    assert Triple(Iri(V + "i"), Iri(V + "flagged"), Literal("true", BOOLEAN)) in res.derived_triples()
    # without the schema, no subclass inference happens
    res2 = apply_rules(g, rules)
    assert res2.derived == []


def test_multiple_head_atoms_share_bindings():
    rules = parse_rules("p(?x) -> q(?x, true) ^ r(?x, 2)")
    res = apply_rules(graph_of(":a a :p ."), rules)
    assert len(res.derived) == 2
    assert {str(d.triple.predicate) for d in res.derived} == {f"<{V}q>", f"<{V}r>"}


def test_class_atom_in_head_derives_type_triple():
    rules = parse_rules("p(?x) -> special(?x)")
    res = apply_rules(graph_of(":a a :p ."), rules)
    (d,) = res.derived
    assert d.triple == Triple(Iri(V + "a"), Iri(RDF_TYPE), Iri(V + "special"))


def test_lenient_string_matching_in_builtin_and_constant():
    rules = parse_rules(
        'rule b: p(?x) ^ r(?x, ?v) ^ swrlb:equal(?v, "positive") -> q(?x, true)\n'
        'rule c: p(?x) ^ r(?x, "Negative") -> n(?x, true)\n'
    )
    g = graph_of(':a a :p ; :r "Positive" .\n:b a :p ; :r "negative" .')
    res = apply_rules(g, rules)
    derived = res.derived_triples()
    assert Triple(Iri(V + "a"), Iri(V + "q"), Literal("true", BOOLEAN)) in derived
    assert Triple(Iri(V + "b"), Iri(V + "n"), Literal("true", BOOLEAN)) in derived
    strict = apply_rules(g, rules, strict_strings=True)
    assert strict.derived == []


def test_chaining_to_fixpoint():
    rules = parse_rules("e(?x, ?y) ^ t(?y, ?z) -> t(?x, ?z)\ne(?x, ?y) -> t(?x, ?y)")
    g = graph_of(":a :e :b .\n:b :e :c .\n:c :e :d .")
    res = apply_rules(g, rules)
    t = Iri(V + "t")
    assert Triple(Iri(V + "a"), t, Iri(V + "d")) in res.derived_triples()
    assert len(res.derived) == 6  # transitive closure of a 3-edge chain


def test_monotonicity_and_idempotence():
    rules = parse_rules("p(?x) -> q(?x, true)")
    g = graph_of(":a a :p .")
    res = apply_rules(g, rules)
    for t in g:
        assert t in res.graph
    res2 = apply_rules(res.graph, rules)
    assert res2.derived == []
    assert set(res2.graph) == set(res.graph)


def test_duplicate_derivations_accumulate_provenance_not_triples():
    rules = parse_rules("rule r1: p(?x) -> q(?x, true)\nrule r2: s(?x) -> q(?x, true)")
    g = graph_of(":a a :p .\n:a a :s .")
    res = apply_rules(g, rules)
    (d,) = res.derived
    assert sorted(p.rule_id for p in d.provenance) == ["r1", "r2"]


def test_rederiving_asserted_fact_keeps_it_asserted():
    rules = parse_rules("p(?x) -> q(?x, true)")
    g = graph_of(":a a :p ; :q true .")
    res = apply_rules(g, rules)
    assert res.derived == []
    with pytest.raises(NotDerivedError) as err:
        explain(res, Triple(Iri(V + "a"), Iri(V + "q"), Literal("true", BOOLEAN)))
    assert err.value.asserted is True


def test_explain_distinguishes_absent():
    res = apply_rules(graph_of(":a a :p ."), parse_rules("p(?x) -> q(?x, true)"))
    with pytest.raises(NotDerivedError) as err:
        explain(res, Triple(Iri(V + "a"), Iri(V + "nothere"), Literal("true", BOOLEAN)))
    assert err.value.asserted is False


def test_explain_returns_bindings():
    res = apply_rules(graph_of(":a a :p ."), parse_rules("rule r9: p(?x) -> q(?x, true)"))
    entries = explain(res, Triple(Iri(V + "a"), Iri(V + "q"), Literal("true", BOOLEAN)))
    (rule, bindings) = entries[0]
    assert rule.id == "r9"
    assert bindings["?x"] == Iri(V + "a")


def test_provenance_replays(kb):
    g = kb.fixtures["malaria_rdt_patient"].union(kb.ontology_graph)
    res = apply_rules(g, kb.rules, kb.schema)
    assert res.derived
    for fact in res.derived:
        for prov in fact.provenance:
            rule = res.rules_by_id[prov.rule_id]
            # replay: the head instantiated under the recorded bindings
            # must contain the derived triple
            env = {name.lstrip("?").lower(): term for name, term in prov.bindings.items()}
            matched = False
            for head in rule.head:
                args = []
                for a in head.args:
                    from vbdss.rules import Variable

                    args.append(env[a.name] if isinstance(a, Variable) else a)
                if head.kind == CLASS:
                    candidate = Triple(args[0], Iri(RDF_TYPE), Iri(head.predicate))
                else:
                    candidate = Triple(args[0], Iri(head.predicate), args[1])
                if candidate == fact.triple:
                    matched = True
            assert matched, f"provenance for {fact.triple} does not replay"


# -- consistency ------------------------------------------------------------------


def test_disjoint_membership_violation():
    g = graph_of(
        ":A a owl:Class .\n:B a owl:Class .\n:A owl:disjointWith :B .\n:x a :A .\n:x a :B ."
    )
    schema = build_schema(g)
    violations = check_consistency(g, schema)
    assert len(violations) == 1
    assert violations[0].kind == "disjoint_membership"
    assert violations[0].subject == V + "x"


def test_disjointness_applies_to_subclasses():
    g = graph_of(
        ":A a owl:Class .\n:B a owl:Class .\n:A owl:disjointWith :B .\n"
        ":A1 rdfs:subClassOf :A .\n:x a :A1 .\n:x a :B ."
    )
    violations = check_consistency(g, build_schema(g))
    assert len(violations) == 1


def test_conflicting_boolean_violation():
    g = graph_of(":p :has_Fever true .\n:p :has_Fever false .")
    violations = check_consistency(g, build_schema(Graph()))
    assert len(violations) == 1
    assert violations[0].kind == "conflicting_boolean"
    assert violations[0].subject == V + "p"


def test_consistent_graph_has_no_violations(kb):
    working = kb.ontology_graph
    for fx in kb.fixtures.values():
        working = working.union(fx)
    assert check_consistency(working, kb.schema) == []


# -- naive vs semi-naive equivalence ------------------------------------------------

ORACLE_PREDS = ["p0", "p1", "p2", "p3"]
ORACLE_CLASSES = ["K0", "K1", "K2", "K3"]


def _random_rule(rng: random.Random, ident: int) -> str:
    vars_avail = ["?x", "?y", "?z"]
    n_body = rng.randint(1, 3)
    body = []
    bound = set()
    for i in range(n_body):
        if rng.random() < 0.35:
            v = rng.choice(vars_avail[: rng.randint(1, 3)])
            body.append(f"{rng.choice(ORACLE_CLASSES)}({v})")
            bound.add(v)
        else:
            v1 = rng.choice(vars_avail)
            if rng.random() < 0.6:
                v2 = rng.choice(vars_avail + ["true", "1", '"lit"'])
            else:
                v2 = rng.choice(["c0", "c1", "c2"])
            body.append(f"{rng.choice(ORACLE_PREDS)}({v1}, {v2})")
            bound.add(v1)
            if v2.startswith("?"):
                bound.add(v2)
    if not bound:
        return _random_rule(rng, ident)
    head_var = rng.choice(sorted(bound))
    heads = []
    for _ in range(rng.randint(1, 2)):
        if rng.random() < 0.3:
            heads.append(f"{rng.choice(ORACLE_CLASSES)}({head_var})")
        else:
            obj = rng.choice([head_var, "true", "2"])
            heads.append(f"{rng.choice(ORACLE_PREDS)}({head_var}, {obj})")
    return f"rule g{ident}: " + " ^ ".join(body) + " -> " + " ^ ".join(heads)


def _random_instance(rng: random.Random):
    lines = []
    for i, cls in enumerate(ORACLE_CLASSES):
        lines.append(f":{cls} a owl:Class .")
        if i > 0 and rng.random() < 0.6:
            lines.append(f":{cls} rdfs:subClassOf :{ORACLE_CLASSES[rng.randint(0, i - 1)]} .")
    for _ in range(rng.randint(0, 60)):
        s = f":n{rng.randint(0, 9)}"
        kind = rng.random()
        if kind < 0.3:
            lines.append(f"{s} a :{rng.choice(ORACLE_CLASSES)} .")
        elif kind < 0.8:
            lines.append(f"{s} :{rng.choice(ORACLE_PREDS)} :n{rng.randint(0, 9)} .")
        else:
            obj = rng.choice(["true", "false", "1", "2", '"lit"', '"LIT"'])
            lines.append(f"{s} :{rng.choice(ORACLE_PREDS)} {obj} .")
    g = graph_of("\n".join(lines))
    schema = build_schema(g)
    n_rules = rng.randint(1, 6)
    text = "\n".join(_random_rule(rng, i) for i in range(n_rules))
    return g, schema, parse_rules(text)


def test_seminaive_equals_naive_oracle_and_rule_order_invariance():
    rng = random.Random(1234)
    for i in range(60):
        g, schema, rules = _random_instance(rng)
        expected = naive_fixpoint(g, rules, schema)
        res = apply_rules(g, rules, schema)
        assert set(res.graph) == expected, f"instance {i} diverged from the oracle"
        shuffled = rules[:]
        rng.shuffle(shuffled)
        res2 = apply_rules(g, shuffled, schema)
        assert set(res2.graph) == expected, f"instance {i} sensitive to rule order"


def test_builtin_unbound_second_argument_raises():
    rules = parse_rules('p(?x) ^ swrlb:equal(?x, ?v) -> q(?x, true)')
    with pytest.raises(VbdError):
        apply_rules(graph_of(":a a :p ."), rules)
