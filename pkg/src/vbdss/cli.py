"""Command-line front door (`vbd`).

Everything the HTTP service can do is reachable here against the same
core. Exit codes: 0 success, 2 usage error, 3 knowledge-base or input
load error, 4 operation error (bad query, unknown predicate, missing
case, ...). Violations found during inference are data, not failures.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .bench import bench as run_bench
from .bench import bench_backends
from .cases import CaseStore, decode_term
from .errors import KbLoadError, ParseError, VbdError
from .kb import kb_report, load_kb
from .query import execute, parse_query
from .rules import apply_rules
from .store import Graph
from .terms import Iri
from .text import extract_from_text, emit_rdf
from .turtle import parse_turtle, serialize_turtle
from ._core import BACKEND

EXIT_LOAD_ERROR = 3
EXIT_OP_ERROR = 4


def _fail(exc: VbdError, code: int) -> None:
    click.echo(f"error [{exc.code}]: {exc.message}", err=True)
    sys.exit(code)


def _load_kb(kb_path: str | None):
    try:
        return load_kb(kb_path)
    except (KbLoadError, ParseError) as exc:
        _fail(exc, EXIT_LOAD_ERROR)


def _read_graph(path: str, kb) -> Graph:
    try:
        graph, _ = parse_turtle(Path(path).read_text(encoding="utf-8"), kb.prefixes)
        return graph
    except ParseError as exc:
        exc.source = path
        _fail(exc, EXIT_LOAD_ERROR)
    except OSError as exc:
        click.echo(f"error [io_error]: {exc}", err=True)
        sys.exit(EXIT_LOAD_ERROR)


kb_option = click.option(
    "--kb",
    "kb_path",
    envvar="VBD_KB",
    default=None,
    help="Knowledge base directory (default: the packaged KB; env VBD_KB).",
)
store_option = click.option(
    "--store",
    "store_path",
    envvar="VBD_STORE",
    default="./case_store",
    show_default=True,
    help="Case store directory (env VBD_STORE).",
)


@click.group()
def main() -> None:
    """Decision support for vector-borne disease diagnosis and treatment."""


@main.command()
@kb_option
def load(kb_path):
    """Validate a knowledge base and print its summary report."""
    kb = _load_kb(kb_path)
    click.echo(kb_report(kb).render())


@main.command()
@kb_option
@click.option("--facts", "facts_path", required=True, help="Turtle file with patient facts.")
@click.option("--strict-strings", is_flag=True, help="Case-sensitive string comparison in rules.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def infer(kb_path, facts_path, strict_strings, as_json):
    """Run forward chaining over a facts file and print derivations."""
    kb = _load_kb(kb_path)
    facts = _read_graph(facts_path, kb)
    try:
        result = apply_rules(facts.union(kb.ontology_graph), kb.rules, kb.schema, strict_strings=strict_strings)
    except VbdError as exc:
        _fail(exc, EXIT_OP_ERROR)
    if as_json:
        body = {
            "derived": [
                {"triple": str(d.triple), "provenance": [p.as_dict() for p in d.provenance]}
                for d in result.derived
            ],
            "violations": [v.describe() for v in result.violations],
        }
        click.echo(json.dumps(body, indent=2))
        return
    if not result.derived:
        click.echo("no derivations")
    for d in result.derived:
        rules = ", ".join(sorted({p.rule_id for p in d.provenance}))
        click.echo(f"{_short(kb, d.triple)}    [{rules}]")
    for v in result.violations:
        click.echo(f"violation: {v.describe()}")


def _short(kb, triple) -> str:
    parts = []
    for term in (triple.subject, triple.predicate, triple.object):
        if isinstance(term, Iri):
            parts.append(kb.shrink(term.value))
        else:
            parts.append(str(term))
    return " ".join(parts) + " ."


@main.command()
@kb_option
@click.option("--q", "query_path", required=True, help="Query file (.rq subset).")
@click.option("--data", "data_paths", multiple=True, help="Dataset Turtle file(s); default: KB ontology.")
@click.option("--combined", is_flag=True, help="Also run against the union of all datasets.")
@click.option("--reps", default=5, show_default=True, help="Timing repetitions per run.")
def query(kb_path, query_path, data_paths, combined, reps):
    """Execute a query against one or more datasets, with timings."""
    kb = _load_kb(kb_path)
    try:
        q = parse_query(Path(query_path).read_text(encoding="utf-8"), kb.prefixes.prefixes)
    except ParseError as exc:
        _fail(exc, EXIT_OP_ERROR)
    except OSError as exc:
        click.echo(f"error [io_error]: {exc}", err=True)
        sys.exit(EXIT_LOAD_ERROR)
    datasets: dict[str, Graph] = {}
    for path in data_paths:
        datasets[Path(path).name] = _read_graph(path, kb)
    if not datasets:
        datasets["ontology"] = kb.ontology_graph
    union = Graph()
    for g in datasets.values():
        union = union.union(g)

    def timed(graph):
        table = execute(q, graph)
        samples = []
        for _ in range(max(1, reps)):
            t0 = time.perf_counter()
            execute(q, graph)
            samples.append(time.perf_counter() - t0)
        samples.sort()
        return table, samples[len(samples) // 2]

    total = 0.0
    for name, graph in datasets.items():
        table, median = timed(graph)
        total += median
        click.echo(f"{name}: {len(table)} rows, median {median * 1000:.3f} ms")
    if combined:
        table, median = timed(union)
        click.echo(f"sum of separate medians: {total * 1000:.3f} ms")
        click.echo(f"combined: {len(table)} rows, median {median * 1000:.3f} ms")
    if len(datasets) == 1 and not combined:
        table = execute(q, next(iter(datasets.values())))
        click.echo("\t".join(f"?{v}" for v in table.header))
        for row in table.rows:
            click.echo("\t".join(str(t) for t in row))


@main.command()
@kb_option
@click.option("--json", "as_json", is_flag=True)
def metrics(kb_path, as_json):
    """Ontology quality metrics for the KB."""
    kb = _load_kb(kb_path)
    report = kb.metrics()
    click.echo(json.dumps(report.as_dict(), indent=2) if as_json else report.render())


@main.command()
@kb_option
@click.option("--in", "input_path", required=True, help="Note file or directory of .txt notes.")
@click.option("--lexicon", "lexicon_dir", default=None, help="Lexicon directory (default: KB lexicon).")
@click.option("--patient", required=True, help="Patient IRI or local name, e.g. :p9.")
@click.option("--out", "out_path", default=None, help="Write emitted triples to this Turtle file.")
def extract(kb_path, input_path, lexicon_dir, patient, out_path):
    """Extract clinical entities from notes and emit RDF facts."""
    kb = _load_kb(kb_path)
    lexicon = kb.lexicon
    if lexicon_dir is not None:
        from .text import load_lexicon

        try:
            lexicon = load_lexicon(lexicon_dir, concept_resolver=kb.expand)
        except VbdError as exc:
            _fail(exc, EXIT_LOAD_ERROR)
    root = Path(input_path)
    files = sorted(root.glob("*.txt")) if root.is_dir() else ([root] if root.exists() else [])
    if not files:
        click.echo("error [io_error]: no input notes found", err=True)
        sys.exit(EXIT_LOAD_ERROR)
    text = "\n".join(f.read_text(encoding="utf-8") for f in files)
    mentions = extract_from_text(text, lexicon)
    try:
        triples = emit_rdf(mentions, Iri(kb.expand(patient)), kb.emission_mapping())
    except VbdError as exc:
        _fail(exc, EXIT_OP_ERROR)
    for m in mentions:
        flag = " (corrected)" if m.corrected else ""
        click.echo(f"{m.begin}..{m.end}  {m.surface!r} -> {kb.shrink(m.concept)}{flag}")
    doc = serialize_turtle(Graph(triples), kb.prefixes)
    if out_path:
        Path(out_path).write_text(doc, encoding="utf-8")
        click.echo(f"wrote {len(triples)} triples to {out_path}")
    else:
        click.echo(doc)


@main.command()
@kb_option
@click.option("--reps", default=7, show_default=True)
@click.option("--out", "out_path", default=None, help="Write the TSV report here.")
@click.option(
    "--backend",
    type=click.Choice(["auto", "pure", "native", "both"]),
    default="auto",
    show_default=True,
    help="Kernel backend to benchmark ('both' compares pure vs native).",
)
def bench(kb_path, reps, out_path, backend):
    """Query benchmark: per-dataset vs combined timings (and kernels)."""
    kb = _load_kb(kb_path)
    datasets = kb.bench_datasets()
    if not datasets:
        click.echo("error [kb_load_error]: KB ships no bench datasets", err=True)
        sys.exit(EXIT_LOAD_ERROR)
    queries = {}
    for name, text in sorted(kb.queries.items()):
        try:
            queries[name] = parse_query(text, kb.prefixes.prefixes)
        except ParseError as exc:
            _fail(exc, EXIT_LOAD_ERROR)
    try:
        if backend == "both":
            reports = bench_backends(queries, datasets, reps)
            for name, report in reports.items():
                click.echo(f"== backend: {name}")
                click.echo(report.render())
            report = next(iter(reports.values()))
        else:
            chosen = None if backend == "auto" else backend
            report = run_bench(queries, datasets, reps, backend=chosen)
            click.echo(report.render())
    except KeyError as exc:
        click.echo(f"error [bench_error]: {exc}", err=True)
        sys.exit(EXIT_OP_ERROR)
    if out_path:
        Path(out_path).write_text(report.to_tsv(), encoding="utf-8")
        click.echo(f"wrote {out_path}")


@main.group()
def case():
    """Case workflow against the local case store."""


@case.command("create")
@kb_option
@store_option
@click.argument("case_id")
@click.option("--demo", "demographics", multiple=True, help="PREDICATE=VALUE:DATATYPE, e.g. has_Age=31:integer.")
def case_create(kb_path, store_path, case_id, demographics):
    kb = _load_kb(kb_path)
    demo = []
    for spec_str in demographics:
        try:
            pred, _, rest = spec_str.partition("=")
            value, _, datatype = rest.rpartition(":")
            if not value:
                value, datatype = rest, "string"
            demo.append((pred, decode_term(value, datatype)))
        except VbdError as exc:
            _fail(exc, EXIT_OP_ERROR)
    try:
        CaseStore(store_path).create_case(case_id, kb, demographics=demo)
    except VbdError as exc:
        _fail(exc, EXIT_OP_ERROR)
    click.echo(f"created case {case_id}")


@case.command("assert")
@kb_option
@store_option
@click.argument("case_id")
@click.argument("predicate")
@click.argument("value")
@click.option("--datatype", default="boolean", show_default=True)
def case_assert(kb_path, store_path, case_id, predicate, value, datatype):
    kb = _load_kb(kb_path)
    store = CaseStore(store_path)
    try:
        c = store.load_case(case_id)
        event = store.assert_observation(c, kb, predicate, decode_term(value, datatype))
    except VbdError as exc:
        _fail(exc, EXIT_OP_ERROR)
    click.echo(f"asserted (seq {event.seq}): {predicate} {value}")


@case.command("infer")
@kb_option
@store_option
@click.argument("case_id")
def case_infer(kb_path, store_path, case_id):
    kb = _load_kb(kb_path)
    store = CaseStore(store_path)
    try:
        c = store.load_case(case_id)
        suggestions = store.run_inference(c, kb)
    except VbdError as exc:
        _fail(exc, EXIT_OP_ERROR)
    click.echo(json.dumps(suggestions.as_dict(), indent=2))


@case.command("explain")
@kb_option
@store_option
@click.argument("case_id")
@click.argument("predicate")
@click.argument("value")
@click.option("--datatype", default="boolean", show_default=True)
def case_explain(kb_path, store_path, case_id, predicate, value, datatype):
    """Provenance of a derived fact about the case patient (read-only)."""
    from .rules import explain
    from .terms import Triple

    kb = _load_kb(kb_path)
    store = CaseStore(store_path)
    try:
        c = store.load_case(case_id)
        result = apply_rules(c.facts().union(kb.ontology_graph), kb.rules, kb.schema)
        fact = Triple(c.patient, Iri(kb.expand(predicate)), decode_term(value, datatype))
        entries = explain(result, fact)
    except VbdError as exc:
        _fail(exc, EXIT_OP_ERROR)
    for rule, bindings in entries:
        click.echo(f"rule {rule.id} [{rule.source}]: {rule.text}")
        for name, term in sorted(bindings.items()):
            click.echo(f"    {name} = {term}")


@case.command("show")
@store_option
@click.argument("case_id")
def case_show(store_path, case_id):
    store = CaseStore(store_path)
    try:
        c = store.load_case(case_id)
    except VbdError as exc:
        _fail(exc, EXIT_OP_ERROR)
    click.echo(f"case {c.case_id} (patient {c.patient.value})")
    for e in c.events:
        click.echo(f"  {e.seq:3d} {e.kind:18s} {json.dumps(e.payload, sort_keys=True)}")
    click.echo("facts:")
    for t in sorted(c.facts(), key=str):
        click.echo(f"  {t}")


@case.command("list")
@store_option
def case_list(store_path):
    for case_id in CaseStore(store_path).list_cases():
        click.echo(case_id)


@main.command()
@kb_option
@store_option
@click.option("--addr", envvar="VBD_ADDR", default="127.0.0.1:8000", show_default=True, help="host:port (env VBD_ADDR).")
@click.option("--ui-dir", default=None, help="Serve a built UI from this directory at /ui.")
def serve(kb_path, store_path, addr, ui_dir):
    """Start the HTTP service (fails fast on a bad KB)."""
    from .service import serve as run_serve

    host, _, port = addr.partition(":")
    try:
        run_serve(kb_path, store_path, host or "127.0.0.1", int(port or 8000), ui_dir=ui_dir)
    except (KbLoadError, ParseError) as exc:
        _fail(exc, EXIT_LOAD_ERROR)


@main.command()
def backend():
    """Print the kernel backend selected at import."""
    click.echo(BACKEND)


if __name__ == "__main__":
    main()
