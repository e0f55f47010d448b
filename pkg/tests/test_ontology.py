import random
from collections import deque

import pytest

from vbdss import vocab
from vbdss.errors import SchemaError, UnknownClassError
from vbdss.ontology import build_schema, count_metrics, validate_bfo_alignment
from vbdss.store import Graph
from vbdss.turtle import parse_turtle

V = vocab.VBD_NS


def schema_of(doc: str):
    g, _ = parse_turtle("@prefix : <http://example.org/vbd#> .\n"
                        "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
                        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
                        "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n" + doc)
    return build_schema(g), g


def test_empty_graph_gives_empty_schema():
    schema = build_schema(Graph())
    assert not schema.classes and not schema.subclass_edges and not schema.individuals


def test_subclass_edges_from_upper_level_placements():
    schema, _ = schema_of(":Role rdfs:subClassOf :RealizableEntity .\n"
                          ":Disposition rdfs:subClassOf :RealizableEntity .")
    assert (V + "Role", V + "RealizableEntity") in schema.subclass_edges
    assert (V + "Disposition", V + "RealizableEntity") in schema.subclass_edges
    assert schema.is_subclass_of(V + "Role", V + "RealizableEntity")


def test_subclass_cycle_is_a_load_error():
    with pytest.raises(SchemaError):
        schema_of(":a rdfs:subClassOf :b .\n:b rdfs:subClassOf :c .\n:c rdfs:subClassOf :a .")


def test_is_subclass_of_reflexive_and_unknown_class_errors():
    schema, _ = schema_of(":a rdfs:subClassOf :b .")
    assert schema.is_subclass_of(V + "a", V + "a")
    with pytest.raises(UnknownClassError):
        schema.is_subclass_of(V + "nope", V + "a")


def test_subclass_reachability_matches_bfs_oracle():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(2, 60)
        lines = [f":c{i} a owl:Class ." for i in range(n)]
        edges = set()
        for i in range(1, n):
            for _ in range(rng.randint(0, 2)):
                parent = rng.randint(0, i - 1)  # edges only toward lower ids: acyclic
                edges.add((i, parent))
                lines.append(f":c{i} rdfs:subClassOf :c{parent} .")
        schema, _ = schema_of("\n".join(lines))
        adj = {}
        for child, parent in edges:
            adj.setdefault(child, set()).add(parent)
        for _ in range(20):
            a, b = rng.randint(0, n - 1), rng.randint(0, n - 1)
            seen, queue = {a}, deque([a])
            while queue:
                x = queue.popleft()
                for y in adj.get(x, ()):
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            assert schema.is_subclass_of(V + f"c{a}", V + f"c{b}") == (b in seen)


def test_instances_direct_vs_inferred():
    schema, _ = schema_of(
        ":sub rdfs:subClassOf :top .\n"
        ":top a owl:Class .\n"
        ":x a :sub .\n:y a :sub .\n:z a :top ."
    )
    assert schema.instances_of(V + "top", inferred=False) == {V + "z"}
    assert schema.instances_of(V + "top", inferred=True) == {V + "x", V + "y", V + "z"}
    assert schema.instances_of(V + "sub", inferred=False) == {V + "x", V + "y"}
    with pytest.raises(UnknownClassError):
        schema.instances_of(V + "missing")


def test_inferred_count_dominates_direct_on_random_schemas():
    rng = random.Random(21)
    for _ in range(15):
        n = rng.randint(2, 20)
        lines = [f":k{i} a owl:Class ." for i in range(n)]
        for i in range(1, n):
            lines.append(f":k{i} rdfs:subClassOf :k{rng.randint(0, i - 1)} .")
        for j in range(rng.randint(0, 25)):
            lines.append(f":ind{j} a :k{rng.randint(0, n - 1)} .")
        schema, _ = schema_of("\n".join(lines))
        for i in range(n):
            cls = V + f"k{i}"
            assert len(schema.instances_of(cls, True)) >= len(schema.instances_of(cls, False))


def test_undeclared_class_use_warns_but_loads():
    schema, _ = schema_of(":x a :Mystery .")
    assert any("Mystery" in w for w in schema.warnings)
    assert V + "Mystery" in schema.classes
    assert schema.individuals[V + "x"] == {V + "Mystery"}


def test_count_metrics_hand_fixture():
    lines = [f":c{i} a owl:Class ." for i in range(10)]
    lines += [f":c{i + 1} rdfs:subClassOf :c{i} ." for i in range(9)]
    lines += [f":op{i} a owl:ObjectProperty ." for i in range(3)]
    lines += [f":dp{i} a owl:DatatypeProperty ." for i in range(2)]
    lines += [f":i{j} a :c{j % 4} ." for j in range(24)]
    schema, g = schema_of("\n".join(lines))
    counts = count_metrics(schema, g)
    assert counts.class_count == 10
    assert counts.subclassof_count == 9
    assert counts.object_property_count == 3
    assert counts.data_property_count == 2
    assert counts.individual_count == 24
    assert counts.axiom_count == len(g)
    assert counts.axiom_count >= 10 + 9 + 3 + 2 + 24


def test_count_metrics_empty():
    counts = count_metrics(build_schema(Graph()), Graph())
    assert all(v == 0 for v in counts.as_dict().values())


def test_count_metrics_insertion_order_invariant():
    lines = [":c0 a owl:Class .", ":c1 rdfs:subClassOf :c0 .", ":i a :c1 .", ":dp a owl:DatatypeProperty ."]
    schema1, g1 = schema_of("\n".join(lines))
    schema2, g2 = schema_of("\n".join(reversed(lines)))
    assert count_metrics(schema1, g1) == count_metrics(schema2, g2)


BFO_SPINE = """
:entity a owl:Class .
:continuant rdfs:subClassOf :entity .
:occurrent rdfs:subClassOf :entity .
:immaterial_entity rdfs:subClassOf :continuant .
:site rdfs:subClassOf :immaterial_entity .
"""


def test_bfo_alignment_site_under_immaterial_entity_passes():
    schema, _ = schema_of(BFO_SPINE)
    assert validate_bfo_alignment(schema) == []


def test_bfo_alignment_flags_unanchored_class():
    schema, _ = schema_of(BFO_SPINE + ":orphan a owl:Class .")
    assert validate_bfo_alignment(schema) == [V + "orphan"]


def test_bfo_alignment_requires_roots():
    schema, _ = schema_of(":lonely a owl:Class .")
    with pytest.raises(SchemaError):
        validate_bfo_alignment(schema)
