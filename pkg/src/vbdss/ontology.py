"""Schema view over a graph: classes, hierarchy, properties, individuals.

The schema vocabulary is the OWL/RDFS subset the KB files use:

* ``X a owl:Class``, ``X rdfs:subClassOf Y``, ``X owl:disjointWith Y``
* ``p a owl:ObjectProperty`` / ``owl:DatatypeProperty`` with optional
  ``rdfs:domain`` and ``rdfs:range``
* an IRI typed with a declared class is an individual
* ``rdfs:label`` / ``rdfs:comment`` count as annotations

The subclass relation must be acyclic; building a schema from a graph with
a subclass cycle fails. Individuals typed with undeclared classes are
recorded with a warning (the class is added so downstream invariants hold).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import vocab
from .errors import SchemaError, UnknownClassError
from .store import Graph
from .terms import Iri


@dataclass(frozen=True)
class PropertyDecl:
    iri: str
    domain: str | None = None
    range: str | None = None  # class IRI for object props, datatype tag for data props


@dataclass
class MetricCounts:
    class_count: int = 0
    subclassof_count: int = 0
    object_property_count: int = 0
    data_property_count: int = 0
    individual_count: int = 0
    disjoint_classes_count: int = 0
    annotation_count: int = 0
    axiom_count: int = 0

    @property
    def property_count(self) -> int:
        return self.object_property_count + self.data_property_count

    def as_dict(self) -> dict[str, int]:
        return {
            "axiom_count": self.axiom_count,
            "class_count": self.class_count,
            "subclassof_count": self.subclassof_count,
            "object_property_count": self.object_property_count,
            "data_property_count": self.data_property_count,
            "individual_count": self.individual_count,
            "disjoint_classes_count": self.disjoint_classes_count,
            "annotation_count": self.annotation_count,
        }


@dataclass
class OntologySchema:
    classes: set[str] = field(default_factory=set)
    subclass_edges: set[tuple[str, str]] = field(default_factory=set)
    object_properties: dict[str, PropertyDecl] = field(default_factory=dict)
    data_properties: dict[str, PropertyDecl] = field(default_factory=dict)
    individuals: dict[str, set[str]] = field(default_factory=dict)  # iri -> asserted classes
    disjoint_pairs: set[frozenset[str]] = field(default_factory=set)
    warnings: list[str] = field(default_factory=list)
    _parents: dict[str, set[str]] = field(default_factory=dict, repr=False)
    _children: dict[str, set[str]] = field(default_factory=dict, repr=False)

    # -- hierarchy -------------------------------------------------------------

    def superclasses_of(self, c: str) -> set[str]:
        """c plus everything reachable upward (reflexive-transitive)."""
        self._require_class(c)
        return self._closure(c, self._parents)

    def subclasses_of(self, c: str) -> set[str]:
        """c plus everything reachable downward."""
        self._require_class(c)
        return self._closure(c, self._children)

    def is_subclass_of(self, c1: str, c2: str) -> bool:
        self._require_class(c1)
        self._require_class(c2)
        return c2 in self._closure(c1, self._parents)

    def _closure(self, start: str, edges: dict[str, set[str]]) -> set[str]:
        seen = {start}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nxt in edges.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    def _require_class(self, c: str) -> None:
        if c not in self.classes:
            raise UnknownClassError(f"unknown class {c!r}")

    # -- membership --------------------------------------------------------------

    def instances_of(self, c: str, inferred: bool = False) -> set[str]:
        self._require_class(c)
        wanted = self.subclasses_of(c) if inferred else {c}
        return {ind for ind, cls in self.individuals.items() if cls & wanted}

    def populated_classes(self, inferred: bool = True) -> set[str]:
        """Classes with at least one member (superclasses count when inferred)."""
        direct: set[str] = set()
        for asserted in self.individuals.values():
            direct |= asserted
        direct &= self.classes
        if not inferred:
            return direct
        populated: set[str] = set()
        for c in direct:
            populated |= self.superclasses_of(c)
        return populated & self.classes

    def is_property(self, iri: str) -> bool:
        return iri in self.object_properties or iri in self.data_properties

    def declared_predicates(self) -> set[str]:
        return set(self.object_properties) | set(self.data_properties)


def build_schema(graph: Graph) -> OntologySchema:
    """Extract the schema asserted in a graph; subclass cycles are an error."""
    schema = OntologySchema()
    rdf_type = Iri(vocab.RDF_TYPE)
    cls_marker = Iri(vocab.OWL_CLASS)
    obj_marker = Iri(vocab.OWL_OBJECT_PROPERTY)
    data_marker = Iri(vocab.OWL_DATATYPE_PROPERTY)

    for t in graph.match(None, rdf_type, cls_marker):
        schema.classes.add(t.subject.value)
    for t in graph.match(None, Iri(vocab.RDFS_SUBCLASSOF), None):
        if not isinstance(t.object, Iri):
            raise SchemaError(f"subClassOf object must be a class IRI: {t}")
        schema.subclass_edges.add((t.subject.value, t.object.value))
        schema.classes.add(t.subject.value)
        schema.classes.add(t.object.value)

    object_props = {t.subject.value for t in graph.match(None, rdf_type, obj_marker)}
    data_props = {t.subject.value for t in graph.match(None, rdf_type, data_marker)}
    domains = {t.subject.value: t.object for t in graph.match(None, Iri(vocab.RDFS_DOMAIN), None)}
    ranges = {t.subject.value: t.object for t in graph.match(None, Iri(vocab.RDFS_RANGE), None)}

    def _decl(iri: str, data: bool) -> PropertyDecl:
        dom = domains.get(iri)
        rng = ranges.get(iri)
        domain = dom.value if isinstance(dom, Iri) else None
        if rng is None:
            range_tag = None
        elif isinstance(rng, Iri):
            # data property ranges are xsd datatypes; map them to literal tags
            range_tag = _XSD_TAGS.get(rng.value, rng.value) if data else rng.value
        else:
            range_tag = None
        return PropertyDecl(iri, domain, range_tag)

    schema.object_properties = {p: _decl(p, data=False) for p in object_props}
    schema.data_properties = {p: _decl(p, data=True) for p in data_props}

    for t in graph.match(None, Iri(vocab.OWL_DISJOINT_WITH), None):
        if isinstance(t.object, Iri):
            schema.disjoint_pairs.add(frozenset((t.subject.value, t.object.value)))

    markers = {vocab.OWL_CLASS, vocab.OWL_OBJECT_PROPERTY, vocab.OWL_DATATYPE_PROPERTY}
    declared_classes = set(schema.classes)
    for t in graph.match(None, rdf_type, None):
        if not isinstance(t.object, Iri) or t.object.value in markers:
            continue
        subject, cls = t.subject.value, t.object.value
        if subject in declared_classes or subject in object_props or subject in data_props:
            continue
        if cls not in schema.classes:
            schema.warnings.append(f"individual {subject} typed with undeclared class {cls}")
            schema.classes.add(cls)
        schema.individuals.setdefault(subject, set()).add(cls)

    for child, parent in schema.subclass_edges:
        schema._parents.setdefault(child, set()).add(parent)
        schema._children.setdefault(parent, set()).add(child)

    _reject_cycles(schema)
    return schema


_XSD_TAGS = {
    vocab.XSD_STRING: "string",
    vocab.XSD_BOOLEAN: "boolean",
    vocab.XSD_INTEGER: "integer",
    vocab.XSD_DECIMAL: "decimal",
}


def _reject_cycles(schema: OntologySchema) -> None:
    # iterative DFS three-colour cycle check over subclass edges
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {c: WHITE for c in schema.classes}
    for root in schema.classes:
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(schema._parents.get(root, ())))]
        colour[root] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if colour.get(nxt, WHITE) == GREY:
                    raise SchemaError(f"subclass cycle through {nxt!r}")
                if colour.get(nxt, WHITE) == WHITE:
                    colour[nxt] = GREY
                    stack.append((nxt, iter(schema._parents.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                colour[node] = BLACK
                stack.pop()


# -- census ---------------------------------------------------------------------


def count_metrics(schema: OntologySchema, graph: Graph) -> MetricCounts:
    """Deterministic census of asserted statements.

    axiom_count is the number of asserted triples; every other field is a
    census of one statement family (individual_count counts distinct
    individuals, not typing statements).
    """
    annotation_count = sum(
        graph.count(None, Iri(pred), None) for pred in sorted(vocab.ANNOTATION_PREDICATES)
    )
    return MetricCounts(
        class_count=len(schema.classes),
        subclassof_count=len(schema.subclass_edges),
        object_property_count=len(schema.object_properties),
        data_property_count=len(schema.data_properties),
        individual_count=len(schema.individuals),
        disjoint_classes_count=len(schema.disjoint_pairs),
        annotation_count=annotation_count,
        axiom_count=len(graph),
    )


# -- upper-ontology conformance ---------------------------------------------------

ENTITY = vocab.VBD_NS + "entity"
CONTINUANT = vocab.VBD_NS + "continuant"
OCCURRENT = vocab.VBD_NS + "occurrent"


def validate_bfo_alignment(schema: OntologySchema) -> list[str]:
    """Classes not anchored under the upper-ontology split.

    Every class except the root must reach ``entity`` through ``continuant``
    or ``occurrent``. Returns the violating class IRIs (empty = aligned).
    """
    for root in (ENTITY, CONTINUANT, OCCURRENT):
        if root not in schema.classes:
            raise SchemaError(f"upper-ontology root {root!r} missing from schema")
    anchored = schema.subclasses_of(CONTINUANT) | schema.subclasses_of(OCCURRENT)
    violations = []
    for c in sorted(schema.classes):
        if c == ENTITY:
            continue
        if c not in anchored or ENTITY not in schema.superclasses_of(c):
            violations.append(c)
    return violations
