import random

import pytest

from vbdss.errors import ParseError
from vbdss.query import QueryVar, execute, parse_query
from vbdss.store import Graph
from vbdss.terms import Iri, Literal
from vbdss.turtle import parse_turtle
from vbdss.vocab import RDF_TYPE, VBD_NS

from .oracles import brute_force_query, random_graph

V = VBD_NS


def graph_of(doc: str) -> Graph:
    g, _ = parse_turtle("@prefix : <http://example.org/vbd#> .\n" + doc)
    return g


def test_parse_simple_select():
    q = parse_query("SELECT ?p WHERE { ?p a :patient }")
    assert q.select_vars == ["p"]
    assert len(q.patterns) == 1
    assert q.patterns[0][1] == Iri(RDF_TYPE)


def test_parse_filters():
    q = parse_query('SELECT ?v WHERE { ?p :r ?v } FILTER(?v = "positive") FILTER(?p != ?v)')
    assert len(q.filters) == 2
    assert q.filters[0].op == "="
    assert q.filters[0].right == Literal("positive")
    assert isinstance(q.filters[1].right, QueryVar)


def test_unbound_select_variable_is_an_error():
    with pytest.raises(ParseError) as err:
        parse_query("SELECT ?x WHERE { ?p a :patient }")
    assert "?x" in str(err.value)


def test_unbound_filter_variable_is_an_error():
    with pytest.raises(ParseError):
        parse_query('SELECT ?p WHERE { ?p a :patient } FILTER(?v = "x")')


def test_syntax_error_position():
    with pytest.raises(ParseError) as err:
        parse_query("SELECT ?p WHERE { ?p a }")
    assert err.value.line >= 1


def test_prefix_declaration_in_query():
    q = parse_query("PREFIX ex: <http://other/>\nSELECT ?p WHERE { ?p ex:r ?q }")
    assert q.patterns[0][1] == Iri("http://other/r")


def test_empty_graph_returns_no_rows():
    q = parse_query("SELECT ?p WHERE { ?p a :patient }")
    assert len(execute(q, Graph())) == 0


def test_patient_listing():
    g = graph_of(":a a :patient .\n:b a :patient .\n:c a :patient .\n:d a :other .")
    q = parse_query("SELECT ?p WHERE { ?p a :patient }")
    table = execute(q, g)
    assert len(table) == 3
    assert {row[0] for row in table.rows} == {Iri(V + "a"), Iri(V + "b"), Iri(V + "c")}


def test_join_and_filter():
    g = graph_of(
        ':a a :patient ; :has_ME_Result "positive" .\n'
        ':b a :patient ; :has_ME_Result "negative" .\n'
    )
    q = parse_query(
        'SELECT ?p ?v WHERE { ?p a :patient . ?p :has_ME_Result ?v } FILTER(?v = "positive")'
    )
    table = execute(q, g)
    assert table.rows == [(Iri(V + "a"), Literal("positive"))]


def test_same_variable_twice_in_pattern():
    g = graph_of(":a :likes :a .\n:b :likes :c .")
    q = parse_query("SELECT ?x WHERE { ?x :likes ?x }")
    assert [row[0] for row in execute(q, g).rows] == [Iri(V + "a")]


def test_rows_deduplicated():
    g = graph_of(":a :r :b .\n:a :r :c .")
    q = parse_query("SELECT ?x WHERE { ?x :r ?y }")
    assert len(execute(q, g)) == 1


def test_pattern_order_invariance():
    g = graph_of(":a a :patient ; :has_Fever true ; :has_Age 30 .\n:b a :patient ; :has_Age 40 .")
    q1 = parse_query("SELECT ?p ?n WHERE { ?p a :patient . ?p :has_Fever true . ?p :has_Age ?n }")
    q2 = parse_query("SELECT ?p ?n WHERE { ?p :has_Age ?n . ?p :has_Fever true . ?p a :patient }")
    assert execute(q1, g).rows == execute(q2, g).rows


def test_union_monotonicity():
    g1 = graph_of(":a a :patient .")
    g2 = graph_of(":b a :patient .")
    q = parse_query("SELECT ?p WHERE { ?p a :patient }")
    rows_union = set(execute(q, g1.union(g2)).rows)
    assert set(execute(q, g1).rows) <= rows_union
    assert set(execute(q, g2).rows) <= rows_union


def _random_query(rng: random.Random, g: Graph):
    triples = sorted(g, key=str)
    n_patterns = rng.randint(1, 3)
    patterns = []
    var_names = ["x", "y", "z", "w"]
    used_vars = []
    for _ in range(n_patterns):
        slots = []
        base = rng.choice(triples) if triples else None
        for i in range(3):
            r = rng.random()
            if r < 0.45 and base is not None and not (i < 2 and r < 0.05):
                slots.append((base.subject, base.predicate, base.object)[i])
            else:
                name = rng.choice(var_names)
                slots.append(f"?{name}")
                used_vars.append(name)
        patterns.append(tuple(slots))
    if not used_vars:
        patterns[0] = ("?x", patterns[0][1], patterns[0][2])
        used_vars.append("x")
    select = sorted(set(rng.sample(used_vars, rng.randint(1, len(set(used_vars))))))

    def render(slot):
        if isinstance(slot, str):
            return slot
        if isinstance(slot, Iri):
            return f"<{slot.value}>"
        return str(slot)

    text = "SELECT " + " ".join(f"?{v}" for v in select) + " WHERE { "
    text += " . ".join(" ".join(render(s) for s in p) for p in patterns) + " }"
    return parse_query(text)


def test_execute_equals_brute_force_on_random_instances():
    rng = random.Random(2024)
    for i in range(60):
        g = random_graph(rng, 120)
        for _ in range(3):
            q = _random_query(rng, g)
            got = set(execute(q, g).rows)
            expected = brute_force_query(q, g)
            assert got == expected, f"instance {i}: {q.text}"
