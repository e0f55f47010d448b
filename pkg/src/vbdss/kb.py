"""Shipped knowledge base: loader, validator, and summary report.

A KB directory contains::

    ontology.ttl          class hierarchy, properties, canonical individuals
    rules/<source>.rules  rule corpus; file stem is the source tag
    lexicon/              dictionary.txt, stopwords.txt, vocabulary.tsv,
                          abbreviations.txt
    fixtures/*.ttl        named patient graphs
    suggestions.tsv       predicate -> suggestion bucket routing
    queries/*.rq          benchmark queries (optional)
    bench/*.ttl           benchmark datasets (optional, loaded lazily)

Loading validates the KB contract: every rule predicate is declared
in the schema, every class is anchored in the upper ontology, rule sources
are known, prose rules carry a citation note, and vocabulary concepts have
an emission mapping. Any violation is a KbLoadError naming the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import KbLoadError, ParseError, RuleSafetyError, SchemaError, VbdError
from .metrics import MetricsReport, metrics_report
from .ontology import MetricCounts, OntologySchema, build_schema, count_metrics, validate_bfo_alignment
from .rules import BUILTIN, CLASS, Rule, parse_rules
from .store import Graph
from .text import Lexicon, load_lexicon
from .turtle import PrefixTable, parse_turtle
from .vocab import STANDARD_PREFIXES, VBD_NS

RULE_SOURCES = ("table2", "table3", "table4", "prose")
SUGGESTION_BUCKETS = ("suspected", "test", "prescription", "finding")


@dataclass(frozen=True)
class SuggestionRoute:
    predicate: str  # IRI
    bucket: str
    value: str | None  # disease IRI for "suspected"; None otherwise


@dataclass
class KnowledgeBase:
    root: Path
    ontology_graph: Graph
    prefixes: PrefixTable
    schema: OntologySchema
    rules: list[Rule]
    lexicon: Lexicon
    fixtures: dict[str, Graph]
    suggestion_routes: dict[str, SuggestionRoute]
    queries: dict[str, str] = field(default_factory=dict)

    def rules_by_source(self) -> dict[str, list[Rule]]:
        out: dict[str, list[Rule]] = {}
        for rule in self.rules:
            out.setdefault(rule.source, []).append(rule)
        return out

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def emission_mapping(self) -> dict[str, str]:
        """Concept IRI -> emission style for text_pipeline.emit_rdf."""
        mapping: dict[str, str] = {}
        for concept in set(self.lexicon.vocabulary.values()):
            if concept in self.schema.data_properties:
                mapping[concept] = "data_property"
            elif concept in self.schema.classes:
                mapping[concept] = "class"
        return mapping

    def bench_datasets(self) -> dict[str, Graph]:
        out: dict[str, Graph] = {}
        bench_dir = self.root / "bench"
        if bench_dir.is_dir():
            for path in sorted(bench_dir.glob("*.ttl")):
                graph, _ = _parse_ttl(path, self.prefixes)
                out[path.stem] = graph
        return out

    def shrink(self, iri: str) -> str:
        short = self.prefixes.shrink(iri)
        return short if short is not None else f"<{iri}>"

    def expand(self, name: str) -> str:
        """Resolve a prefixed or <absolute> name against the KB prefixes."""
        if name.startswith("<") and name.endswith(">"):
            return name[1:-1]
        if ":" in name:
            prefix, _, local = name.partition(":")
            if prefix in self.prefixes.prefixes:
                return self.prefixes.expand(prefix, local)
            return name  # already an absolute IRI with a scheme
        return VBD_NS + name

    def counts(self) -> MetricCounts:
        return count_metrics(self.schema, self.ontology_graph)

    def metrics(self) -> MetricsReport:
        return metrics_report(self.counts(), self.schema)


def default_kb_path() -> Path:
    return Path(str(resources.files("vbdss") / "kb_data"))


def _parse_ttl(path: Path, seed_prefixes: PrefixTable | None = None) -> tuple[Graph, PrefixTable]:
    try:
        return parse_turtle(path.read_text(encoding="utf-8"), seed_prefixes)
    except ParseError as exc:
        raise KbLoadError(exc.bare_message, path=str(path), line=exc.line) from exc


def load_kb(directory: str | Path | None = None) -> KnowledgeBase:
    """Load and fully validate a KB directory (default: the shipped KB)."""
    root = Path(directory) if directory is not None else default_kb_path()
    if not root.is_dir():
        raise KbLoadError("knowledge base directory not found", path=str(root))
    ontology_path = root / "ontology.ttl"
    if not ontology_path.exists():
        raise KbLoadError("ontology.ttl missing", path=str(root))

    ontology_graph, prefixes = _parse_ttl(ontology_path)
    for label, base in STANDARD_PREFIXES.items():
        prefixes.prefixes.setdefault(label, base)

    try:
        schema = build_schema(ontology_graph)
    except SchemaError as exc:
        raise KbLoadError(str(exc), path=str(ontology_path)) from exc

    try:
        violations = validate_bfo_alignment(schema)
    except SchemaError as exc:
        raise KbLoadError(str(exc), path=str(ontology_path)) from exc
    if violations:
        raise KbLoadError(
            f"{len(violations)} classes not anchored under the upper ontology: "
            + ", ".join(violations[:5]),
            path=str(ontology_path),
        )

    rules: list[Rule] = []
    rules_dir = root / "rules"
    if not rules_dir.is_dir():
        raise KbLoadError("rules/ directory missing", path=str(root))
    for path in sorted(rules_dir.glob("*.rules")):
        source = path.stem
        if source not in RULE_SOURCES:
            raise KbLoadError(f"unknown rule source {source!r}", path=str(path))
        try:
            rules.extend(parse_rules(path.read_text(encoding="utf-8"), source=source, prefixes=prefixes.prefixes))
        except (ParseError, RuleSafetyError) as exc:
            raise KbLoadError(str(exc), path=str(path)) from exc
    if not rules:
        raise KbLoadError("rule corpus is empty", path=str(rules_dir))

    _validate_rule_predicates(rules, schema, rules_dir)
    for rule in rules:
        if rule.source == "prose" and not rule.note:
            raise KbLoadError(f"prose rule {rule.id} has no citation note", path=str(rules_dir))

    lexicon_dir = root / "lexicon"
    if not lexicon_dir.is_dir():
        raise KbLoadError("lexicon/ directory missing", path=str(root))

    def resolve_concept(name: str) -> str:
        if name.startswith(":"):
            return prefixes.expand("", name[1:])
        if ":" in name:
            prefix, _, local = name.partition(":")
            if prefix in prefixes.prefixes:
                return prefixes.expand(prefix, local)
        return name

    try:
        lexicon = load_lexicon(lexicon_dir, concept_resolver=resolve_concept)
    except VbdError as exc:
        raise KbLoadError(str(exc), path=str(lexicon_dir)) from exc
    for phrase, concept in sorted(lexicon.vocabulary.items()):
        if concept not in schema.data_properties and concept not in schema.classes:
            raise KbLoadError(
                f"vocabulary concept {concept} (phrase {phrase!r}) is not declared in the schema",
                path=str(lexicon_dir / "vocabulary.tsv"),
            )

    fixtures: dict[str, Graph] = {}
    fixtures_dir = root / "fixtures"
    if fixtures_dir.is_dir():
        for path in sorted(fixtures_dir.glob("*.ttl")):
            graph, _ = _parse_ttl(path, prefixes)
            fixtures[path.stem] = graph

    routes = _load_suggestion_routes(root / "suggestions.tsv", schema, prefixes)

    queries: dict[str, str] = {}
    queries_dir = root / "queries"
    if queries_dir.is_dir():
        for path in sorted(queries_dir.glob("*.rq")):
            queries[path.stem] = path.read_text(encoding="utf-8")

    return KnowledgeBase(
        root=root,
        ontology_graph=ontology_graph,
        prefixes=prefixes,
        schema=schema,
        rules=rules,
        lexicon=lexicon,
        fixtures=fixtures,
        suggestion_routes=routes,
        queries=queries,
    )


def _validate_rule_predicates(rules: list[Rule], schema: OntologySchema, rules_dir: Path) -> None:
    for rule in rules:
        for atom in rule.body + rule.head:
            if atom.kind == BUILTIN:
                continue
            if atom.kind == CLASS:
                if atom.predicate not in schema.classes:
                    raise KbLoadError(
                        f"rule {rule.id} uses undeclared class {atom.predicate}", path=str(rules_dir)
                    )
            elif not schema.is_property(atom.predicate):
                raise KbLoadError(
                    f"rule {rule.id} uses undeclared property {atom.predicate}", path=str(rules_dir)
                )


def _load_suggestion_routes(
    path: Path, schema: OntologySchema, prefixes: PrefixTable
) -> dict[str, SuggestionRoute]:
    if not path.exists():
        raise KbLoadError("suggestions.tsv missing", path=str(path.parent))
    routes: dict[str, SuggestionRoute] = {}

    def expand(name: str) -> str:
        if ":" in name and not name.startswith(":"):
            prefix, _, local = name.partition(":")
            return prefixes.expand(prefix, local)
        return prefixes.expand("", name.lstrip(":"))

    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise KbLoadError("expected 'predicate<TAB>bucket[<TAB>value]'", path=str(path), line=lineno)
        predicate = expand(parts[0])
        bucket = parts[1].strip()
        if bucket not in SUGGESTION_BUCKETS:
            raise KbLoadError(f"unknown suggestion bucket {bucket!r}", path=str(path), line=lineno)
        value = None
        if len(parts) == 3 and parts[2].strip() not in ("", "-"):
            value = expand(parts[2])
        if not schema.is_property(predicate):
            raise KbLoadError(f"suggestion predicate {parts[0]} not declared", path=str(path), line=lineno)
        if bucket == "suspected" and value is None:
            raise KbLoadError("suspected routes need a disease IRI value", path=str(path), line=lineno)
        if bucket == "suspected" and value not in schema.classes:
            raise KbLoadError(f"suspected route target {parts[2]} is not a class", path=str(path), line=lineno)
        routes[predicate] = SuggestionRoute(predicate, bucket, value)
    return routes


# -- report -------------------------------------------------------------------


@dataclass
class KbReport:
    class_count: int
    rule_counts: dict[str, int]
    fixture_names: list[str]
    disease_classes: list[str]
    warnings: list[str]
    metrics: MetricsReport

    def render(self) -> str:
        lines = ["knowledge base summary", "----------------------"]
        lines.append(f"classes: {self.class_count}")
        total = sum(self.rule_counts.values())
        per_source = ", ".join(f"{src}: {n}" for src, n in sorted(self.rule_counts.items()))
        lines.append(f"rules: {total} ({per_source})")
        lines.append(f"diseases: {', '.join(self.disease_classes)}")
        lines.append(f"fixtures: {', '.join(self.fixture_names) or '(none)'}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        lines.append("")
        lines.append(self.metrics.render())
        return "\n".join(lines)


DISEASE_PARENT = VBD_NS + "disposition"


def disease_classes(schema: OntologySchema) -> list[str]:
    """Disease classes: subclasses of the disposition branch that the
    suggestion routes or rules reference as diagnoses."""
    if DISEASE_PARENT not in schema.classes:
        return []
    below = schema.subclasses_of(DISEASE_PARENT) - {DISEASE_PARENT}
    roles = schema.subclasses_of(VBD_NS + "role") if (VBD_NS + "role") in schema.classes else set()
    return sorted(below - roles)


def kb_report(kb: KnowledgeBase) -> KbReport:
    rule_counts = {src: len(rules) for src, rules in kb.rules_by_source().items()}
    return KbReport(
        class_count=len(kb.schema.classes),
        rule_counts=rule_counts,
        fixture_names=sorted(kb.fixtures),
        disease_classes=[kb.shrink(c) for c in disease_classes(kb.schema)],
        warnings=list(kb.schema.warnings),
        metrics=kb.metrics(),
    )
