"""Patient-case lifecycle: create, assert, infer, explain, repeat.

Each case is an append-only event log; the facts graph is a pure fold of
the log, so saving and loading a case reproduces its state exactly. Log
files are JSON lines (field names: seq, kind, s, p, o, datatype, at), one
file per case under the store root, appended on every mutation so a crash
loses at most the line being written. A truncated trailing line is
tolerated on load; corruption earlier in the file is an error.

Retraction does not delete: a retraction_marker event excludes the target
assertion from the fold, and the next inference recomputes from scratch
(retracting a fact under Horn semantics invalidates downstream
derivations, so incremental maintenance is not attempted).

Concurrency: one lock per case serialises mutations; different cases are
independent. The KB is shared read-only.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import (
    CaseNotFoundError,
    CorruptLogError,
    DuplicateCaseError,
    UnknownPredicateError,
    VbdError,
)
from .kb import KnowledgeBase
from .rules import InferenceResult, Violation, apply_rules, explain
from .store import Graph
from .terms import BOOLEAN, DATATYPES, INTEGER, Iri, Literal, Term, Triple
from .text import suggest_similar
from .vocab import RDF_TYPE, VBD_NS

CASE_CREATED = "case_created"
ASSERTION = "assertion"
RETRACTION_MARKER = "retraction_marker"
INFERENCE_RUN = "inference_run"

PATIENT_CLASS = VBD_NS + "patient"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: dict
    at: str

    def to_json(self) -> str:
        record = {"seq": self.seq, "kind": self.kind, "at": self.at}
        record.update(self.payload)
        return json.dumps(record, sort_keys=True)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def encode_term(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"o": term.value, "datatype": "iri"}
    return {"o": term.lexical, "datatype": term.datatype}


def decode_term(value: str, datatype: str) -> Term:
    if datatype == "iri":
        return Iri(value)
    if datatype not in DATATYPES:
        raise VbdError(f"unknown datatype tag {datatype!r}")
    return Literal(value, datatype)


@dataclass
class Suggestions:
    suspected: list[dict] = field(default_factory=list)
    recommended_tests: list[dict] = field(default_factory=list)
    prescriptions: list[dict] = field(default_factory=list)
    findings: list[dict] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (
            self.suspected or self.recommended_tests or self.prescriptions or self.findings
        )

    def as_dict(self) -> dict:
        return {
            "suspected": self.suspected,
            "recommended_tests": self.recommended_tests,
            "prescriptions": self.prescriptions,
            "findings": self.findings,
            "violations": [
                {"kind": v.kind, "subject": v.subject, "statements": [str(s) for s in v.statements]}
                for v in self.violations
            ],
        }


@dataclass
class PatientCase:
    case_id: str
    patient: Iri
    events: list[Event] = field(default_factory=list)
    last_inference: InferenceResult | None = None
    last_suggestions: Suggestions | None = None

    @property
    def next_seq(self) -> int:
        return len(self.events) + 1

    def facts(self) -> Graph:
        """Replay the event log into the current facts graph."""
        retracted = {
            e.payload["target_seq"] for e in self.events if e.kind == RETRACTION_MARKER
        }
        g = Graph()
        for e in self.events:
            if e.kind == CASE_CREATED:
                g.insert(Triple(self.patient, Iri(RDF_TYPE), Iri(PATIENT_CLASS)))
            elif e.kind == ASSERTION and e.seq not in retracted:
                g.insert(
                    Triple(
                        Iri(e.payload["s"]),
                        Iri(e.payload["p"]),
                        decode_term(e.payload["o"], e.payload["datatype"]),
                    )
                )
        return g


class CaseStore:
    """Directory of case logs; the single writer for every case it owns."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def _lock(self, case_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(case_id, threading.Lock())

    def _path(self, case_id: str) -> Path:
        safe = case_id.replace("/", "_")
        return self.root / f"{safe}.log"

    def list_cases(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.log"))

    # -- lifecycle ---------------------------------------------------------

    def create_case(
        self,
        case_id: str,
        kb: KnowledgeBase,
        demographics: list[tuple[str, Term]] | None = None,
        patient_iri: str | None = None,
    ) -> PatientCase:
        with self._lock(case_id):
            path = self._path(case_id)
            if path.exists():
                raise DuplicateCaseError(f"case {case_id!r} already exists")
            patient = Iri(patient_iri or VBD_NS + case_id)
            case = PatientCase(case_id, patient)
            self._append(case, Event(1, CASE_CREATED, {"s": patient.value}, _now()))
            for predicate, value in demographics or []:
                self._assert_locked(case, kb, predicate, value)
            return case

    def get_case(self, case_id: str) -> PatientCase:
        return self.load_case(case_id)

    def load_case(self, case_id: str) -> PatientCase:
        path = self._path(case_id)
        if not path.exists():
            raise CaseNotFoundError(f"case {case_id!r} not found")
        events: list[Event] = []
        patient: Iri | None = None
        raw = path.read_text(encoding="utf-8")
        lines = raw.split("\n")
        trailing_partial = not raw.endswith("\n")
        for idx, line in enumerate(lines):
            if not line.strip():
                continue
            is_last = idx == len(lines) - 1
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                if is_last and trailing_partial:
                    logger.warning(
                        "case %r: dropping torn trailing log line (interrupted append)", case_id
                    )
                    break
                raise CorruptLogError(
                    f"case {case_id!r}: unreadable event at line {idx + 1}", seq=idx + 1
                ) from None
            expected = len(events) + 1
            if record.get("seq") != expected:
                raise CorruptLogError(
                    f"case {case_id!r}: expected seq {expected}, found {record.get('seq')}",
                    seq=expected,
                )
            payload = {k: v for k, v in record.items() if k not in ("seq", "kind", "at")}
            events.append(Event(record["seq"], record["kind"], payload, record["at"]))
            if record["kind"] == CASE_CREATED:
                patient = Iri(record["s"])
        if patient is None:
            raise CorruptLogError(f"case {case_id!r}: log has no creation event", seq=1)
        return PatientCase(case_id, patient, events)

    # -- mutations ----------------------------------------------------------

    def assert_observation(
        self, case: PatientCase, kb: KnowledgeBase, predicate: str, value: Term
    ) -> Event:
        with self._lock(case.case_id):
            return self._assert_locked(case, kb, predicate, value)

    def _assert_locked(
        self, case: PatientCase, kb: KnowledgeBase, predicate: str, value: Term
    ) -> Event:
        predicate_iri = kb.expand(predicate)
        if not kb.schema.is_property(predicate_iri) and predicate_iri != RDF_TYPE:
            declared = sorted(kb.schema.declared_predicates())
            local = predicate_iri.rsplit("#", 1)[-1]
            nearest = suggest_similar(local, [d.rsplit("#", 1)[-1] for d in declared])
            raise UnknownPredicateError(
                f"predicate {predicate!r} is not declared in the KB schema"
                + (f"; did you mean: {', '.join(nearest)}?" if nearest else ""),
                suggestions=nearest,
            )
        payload = {"s": case.patient.value, "p": predicate_iri}
        payload.update(encode_term(value))
        event = Event(case.next_seq, ASSERTION, payload, _now())
        self._append(case, event)
        case.last_suggestions = None  # stale after new facts
        return event

    def retract(self, case: PatientCase, target_seq: int) -> Event:
        with self._lock(case.case_id):
            kinds = {e.seq: e.kind for e in case.events}
            if kinds.get(target_seq) != ASSERTION:
                raise VbdError(f"event {target_seq} is not a retractable assertion")
            event = Event(case.next_seq, RETRACTION_MARKER, {"target_seq": target_seq}, _now())
            self._append(case, event)
            case.last_suggestions = None
            return event

    def run_inference(self, case: PatientCase, kb: KnowledgeBase) -> Suggestions:
        """Apply the KB rules to the case facts plus the ontology and map
        the derived facts into suggestion buckets."""
        with self._lock(case.case_id):
            working = case.facts().union(kb.ontology_graph)
            result = apply_rules(working, kb.rules, kb.schema)
            suggestions = build_suggestions(result, case.patient, kb)
            event = Event(
                case.next_seq,
                INFERENCE_RUN,
                {"derived": len(result.derived), "violations": len(result.violations)},
                _now(),
            )
            self._append(case, event)
            case.last_inference = result
            case.last_suggestions = suggestions
            return suggestions

    def _append(self, case: PatientCase, event: Event) -> None:
        with self._path(case.case_id).open("a", encoding="utf-8") as fh:
            fh.write(event.to_json() + "\n")
        case.events.append(event)


def build_suggestions(result: InferenceResult, patient: Iri, kb: KnowledgeBase) -> Suggestions:
    """Route the patient's derived facts into suggestion buckets using the
    KB's declarative predicate map; every entry carries its rule ids."""
    out = Suggestions(violations=list(result.violations))
    seen_suspected: set[str] = set()
    seen_tests: set[str] = set()
    seen_findings: set[tuple[str, str]] = set()
    prescriptions: dict[str, dict] = {}

    for fact in result.derived:
        t = fact.triple
        if t.subject != patient:
            continue
        route = kb.suggestion_routes.get(t.predicate.value)
        if route is None:
            continue
        rule_ids = sorted({p.rule_id for p in fact.provenance})
        if route.bucket == "suspected":
            if t.object == Literal("true", BOOLEAN) and route.value not in seen_suspected:
                seen_suspected.add(route.value)
                out.suspected.append({"disease": route.value, "rule_ids": rule_ids, "via": t.predicate.value})
        elif route.bucket == "test":
            if isinstance(t.object, Iri) and t.object.value not in seen_tests:
                seen_tests.add(t.object.value)
                out.recommended_tests.append({"test": t.object.value, "rule_ids": rule_ids})
        elif route.bucket == "prescription":
            if isinstance(t.object, Iri):
                entry = prescriptions.setdefault(
                    t.object.value, {"drug": t.object.value, "rule_ids": [], "duration_days": None, "on_day": None}
                )
                entry["rule_ids"] = sorted(set(entry["rule_ids"]) | set(rule_ids))
        elif route.bucket == "finding":
            key = (t.predicate.value, str(t.object))
            if key not in seen_findings:
                seen_findings.add(key)
                out.findings.append(
                    {"predicate": t.predicate.value, "value": str(t.object), "rule_ids": rule_ids}
                )

    duration_iri = Iri(VBD_NS + "is_Prescribed_For_Duration")
    on_day_iri = Iri(VBD_NS + "is_Prescribed_OnDay")
    for drug, entry in prescriptions.items():
        for t in result.graph.match(Iri(drug), duration_iri, None):
            if isinstance(t.object, Literal) and t.object.datatype == INTEGER:
                entry["duration_days"] = t.object.value
        for t in result.graph.match(Iri(drug), on_day_iri, None):
            if isinstance(t.object, Literal) and t.object.datatype == INTEGER:
                entry["on_day"] = t.object.value
        out.prescriptions.append(entry)
    out.prescriptions.sort(key=lambda e: e["drug"])
    return out


def explain_fact(result: InferenceResult, s: Term, p: Term, o: Term):
    """explain() over wire-shaped terms; returns (rule, bindings) pairs."""
    return explain(result, Triple(s, p, o))
