"""HTTP front door.

Thin JSON layer over the same core the CLI uses; no service-only logic.
Endpoints (documented in docs/api.md):

    GET  /health
    GET  /kb/properties
    GET  /metrics
    POST /cases                         {case_id, patient_id?, demographics?}
    GET  /cases/{id}
    POST /cases/{id}/assertions        {p, o, datatype}
    POST /cases/{id}/infer
    GET  /cases/{id}/explain?p=&o=&datatype=[&s=]
    POST /query                        {query, datasets?}
    POST /extract                      {text, patient}

Every failure body is one ApiError: {code, message, detail}. Terms on the
wire are {o, datatype} pairs where datatype is "iri" or a literal tag.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .cases import CaseStore, PatientCase, Suggestions, build_suggestions, decode_term, encode_term
from .errors import NotDerivedError, VbdError
from .kb import KnowledgeBase, kb_report, load_kb
from .query import execute, parse_query
from .rules import apply_rules
from .store import Graph
from .terms import Iri, Literal, Term, Triple
from .text import extract_from_text, emit_rdf
from .turtle import serialize_turtle
from .vocab import RDF_TYPE

INFERENCE_RUN = "inference_run"


class TermPayload(BaseModel):
    p: str
    o: str
    datatype: str = "boolean"


class CreateCasePayload(BaseModel):
    case_id: str
    patient_id: str | None = None
    demographics: list[TermPayload] = Field(default_factory=list)


class QueryPayload(BaseModel):
    query: str
    datasets: list[str] = Field(default_factory=list)


class ExtractPayload(BaseModel):
    text: str
    patient: str


def _error_response(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


_STATUS_BY_CODE = {
    "case_not_found": 404,
    "duplicate_case": 409,
    "unknown_predicate": 400,
    "parse_error": 400,
    "kb_load_error": 500,
    "not_derived": 400,
}


class ServiceState:
    """KB (read-only) + case store + in-memory case handles."""

    def __init__(self, kb: KnowledgeBase, store: CaseStore):
        self.kb = kb
        self.store = store
        self.cases: dict[str, PatientCase] = {}
        self._guard = threading.Lock()

    def case(self, case_id: str) -> PatientCase:
        with self._guard:
            if case_id not in self.cases:
                self.cases[case_id] = self.store.load_case(case_id)
            return self.cases[case_id]

    def register(self, case: PatientCase) -> None:
        with self._guard:
            self.cases[case.case_id] = case

    def dataset(self, name: str) -> Graph:
        if name == "ontology":
            return self.kb.ontology_graph
        if name in self.kb.fixtures:
            return self.kb.fixtures[name]
        benches = self.kb.bench_datasets()
        if name in benches:
            return benches[name]
        raise VbdError(f"unknown dataset {name!r}; have: ontology, fixtures, bench datasets")

    def suggestions_for_view(self, case: PatientCase) -> Suggestions | None:
        """Latest suggestions; reconstructed from the log if not cached
        (state as of the last inference_run event, so refreshes are
        deterministic)."""
        if case.last_suggestions is not None:
            return case.last_suggestions
        last_run = None
        for e in case.events:
            if e.kind == INFERENCE_RUN:
                last_run = e.seq
        if last_run is None:
            return None
        upto = PatientCase(case.case_id, case.patient, [e for e in case.events if e.seq <= last_run])
        working = upto.facts().union(self.kb.ontology_graph)
        result = apply_rules(working, self.kb.rules, self.kb.schema)
        return build_suggestions(result, case.patient, self.kb)


def create_app(kb: KnowledgeBase, store: CaseStore, *, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="vbdss", version=__version__)
    state = ServiceState(kb, store)
    app.state.service = state

    @app.exception_handler(VbdError)
    async def _vbd_error(request: Request, exc: VbdError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        if isinstance(exc, NotDerivedError) and not exc.asserted:
            status = 404
        return _error_response(status, exc.code, exc.message, getattr(exc, "detail", None))

    # -- kb ----------------------------------------------------------------

    @app.get("/health")
    def health():
        report = kb_report(state.kb)
        return {
            "status": "ok",
            "version": __version__,
            "kb": {
                "classes": report.class_count,
                "rules": sum(report.rule_counts.values()),
                "rules_by_source": report.rule_counts,
                "fixtures": report.fixture_names,
                "diseases": report.disease_classes,
            },
        }

    @app.get("/kb/properties")
    def kb_properties():
        """Property declarations, the UI's source for checklists/forms."""
        schema = state.kb.schema

        def describe(decl) -> dict:
            label = None
            for t in state.kb.ontology_graph.match(Iri(decl.iri), None, None):
                if t.predicate.value.endswith("#label") and isinstance(t.object, Literal):
                    label = t.object.lexical
            return {
                "iri": decl.iri,
                "name": state.kb.shrink(decl.iri),
                "label": label,
                "domain": decl.domain,
                "range": decl.range,
            }

        return {
            "data_properties": [describe(d) for _, d in sorted(schema.data_properties.items())],
            "object_properties": [describe(d) for _, d in sorted(schema.object_properties.items())],
            "patient_class": state.kb.expand("patient"),
        }

    @app.get("/metrics")
    def metrics():
        return state.kb.metrics().as_dict()

    # -- cases ---------------------------------------------------------------

    def _term(payload: TermPayload) -> Term:
        return decode_term(payload.o, payload.datatype)

    def _case_view(case: PatientCase) -> dict:
        facts = case.facts()
        groups: dict[str, list[dict]] = {
            "demographics": [],
            "symptoms": [],
            "test_results": [],
            "other": [],
        }
        retracted = {
            e.payload["target_seq"] for e in case.events if e.kind == "retraction_marker"
        }
        seq_by_triple: dict[str, int] = {}
        for e in case.events:
            if e.kind == "assertion" and e.seq not in retracted:
                key = f"{e.payload['p']}|{e.payload['o']}|{e.payload['datatype']}"
                seq_by_triple.setdefault(key, e.seq)
        for t in sorted(facts, key=str):
            if t.predicate.value == RDF_TYPE:
                continue
            entry = {
                "p": t.predicate.value,
                "name": state.kb.shrink(t.predicate.value),
                **encode_term(t.object),
            }
            key = f"{t.predicate.value}|{entry['o']}|{entry['datatype']}"
            if key in seq_by_triple:
                entry["seq"] = seq_by_triple[key]
            groups[_group_of(state.kb, t)].append(entry)
        suggestions = state.suggestions_for_view(case)
        return {
            "case_id": case.case_id,
            "patient": case.patient.value,
            "events": [
                {"seq": e.seq, "kind": e.kind, "at": e.at, **e.payload} for e in case.events
            ],
            "facts": groups,
            "suggestions": suggestions.as_dict() if suggestions else None,
        }

    @app.post("/cases", status_code=201)
    def create_case(payload: CreateCasePayload):
        demographics = [(tp.p, _term(tp)) for tp in payload.demographics]
        case = state.store.create_case(
            payload.case_id, state.kb, demographics=demographics, patient_iri=payload.patient_id
        )
        state.register(case)
        return _case_view(case)

    @app.get("/cases/{case_id}")
    def get_case(case_id: str):
        return _case_view(state.case(case_id))

    @app.post("/cases/{case_id}/assertions", status_code=201)
    def add_assertion(case_id: str, payload: TermPayload):
        case = state.case(case_id)
        event = state.store.assert_observation(case, state.kb, payload.p, _term(payload))
        return {"seq": event.seq, "kind": event.kind, "at": event.at, **event.payload}

    @app.post("/cases/{case_id}/infer")
    def infer(case_id: str):
        case = state.case(case_id)
        suggestions = state.store.run_inference(case, state.kb)
        body = suggestions.as_dict()
        body["rules"] = _rules_in(suggestions, state.kb)
        return body

    @app.get("/cases/{case_id}/explain")
    def explain_endpoint(case_id: str, p: str, o: str, datatype: str = "boolean", s: str | None = None):
        case = state.case(case_id)
        if case.last_inference is None:
            state.store.run_inference(case, state.kb)
        from .rules import explain

        subject = Iri(s) if s else case.patient
        fact = Triple(subject, Iri(state.kb.expand(p)), decode_term(o, datatype))
        entries = explain(case.last_inference, fact)
        return {
            "fact": {"s": subject.value, "p": fact.predicate.value, **encode_term(fact.object)},
            "provenance": [
                {
                    "rule_id": rule.id,
                    "rule_text": rule.text,
                    "source": rule.source,
                    "bindings": {k: str(v) for k, v in bindings.items()},
                }
                for rule, bindings in entries
            ],
        }

    # -- query / extract ------------------------------------------------------

    @app.post("/query")
    def run_query(payload: QueryPayload):
        query = parse_query(payload.query, state.kb.prefixes.prefixes)
        names = payload.datasets or ["ontology"]
        graph = Graph()
        for name in names:
            graph = graph.union(state.dataset(name))
        table = execute(query, graph)
        return {
            "header": table.header,
            "rows": [[encode_term(t) for t in row] for row in table.rows],
            "row_count": len(table.rows),
            "datasets": names,
        }

    @app.post("/extract")
    def extract(payload: ExtractPayload):
        mentions = extract_from_text(payload.text, state.kb.lexicon)
        patient = Iri(state.kb.expand(payload.patient))
        triples = emit_rdf(mentions, patient, state.kb.emission_mapping())
        return {
            "mentions": [
                {
                    "concept": m.concept,
                    "begin": m.begin,
                    "end": m.end,
                    "surface": m.surface,
                    "corrected": m.corrected,
                }
                for m in mentions
            ],
            "triples": [
                {"s": t.subject.value, "p": t.predicate.value, **encode_term(t.object)}
                for t in triples
            ],
            "turtle": serialize_turtle(Graph(triples), state.kb.prefixes),
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _group_of(kb: KnowledgeBase, t: Triple) -> str:
    local = t.predicate.value.rsplit("#", 1)[-1]
    if local in ("has_Name", "has_Gender", "has_Age"):
        return "demographics"
    decl = kb.schema.data_properties.get(t.predicate.value)
    if decl is not None:
        if "Result" in local:
            return "test_results"
        if decl.range == "boolean":
            return "symptoms"
        return "other"
    return "other"


def _rules_in(suggestions: Suggestions, kb: KnowledgeBase) -> dict[str, dict]:
    """Rule texts referenced by any suggestion entry, keyed by id."""
    ids: set[str] = set()
    for bucket in (
        suggestions.suspected,
        suggestions.recommended_tests,
        suggestions.prescriptions,
        suggestions.findings,
    ):
        for entry in bucket:
            ids.update(entry.get("rule_ids", []))
    out = {}
    for rule_id in sorted(ids):
        try:
            rule = kb.rule(rule_id)
        except KeyError:
            continue
        out[rule_id] = {"text": rule.text, "source": rule.source, "note": rule.note}
    return out


def serve(
    kb_path: str | None,
    store_path: str,
    host: str = "127.0.0.1",
    port: int = 8000,
    *,
    ui_dir: str | None = None,
) -> None:
    """Load the KB (startup fails on a bad KB) and run uvicorn."""
    import uvicorn

    kb = load_kb(kb_path)
    app = create_app(kb, CaseStore(store_path), ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
