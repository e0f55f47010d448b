// Wire types mirroring docs/api.md. The worksheet renders only what the
// server sends; it never infers anything client-side.

export interface TermPayload {
  o: string;
  datatype: string; // "iri" | "string" | "boolean" | "integer" | "decimal"
}

export interface FactEntry extends TermPayload {
  p: string;
  name: string;
  seq?: number;
}

export interface CaseView {
  case_id: string;
  patient: string;
  events: Array<{ seq: number; kind: string; at: string } & Record<string, unknown>>;
  facts: {
    demographics: FactEntry[];
    symptoms: FactEntry[];
    test_results: FactEntry[];
    other: FactEntry[];
  };
  suggestions: Suggestions | null;
}

export interface SuspectedEntry {
  disease: string;
  rule_ids: string[];
  via: string;
}

export interface TestEntry {
  test: string;
  rule_ids: string[];
}

export interface PrescriptionEntry {
  drug: string;
  duration_days: number | null;
  on_day: number | null;
  rule_ids: string[];
}

export interface FindingEntry {
  predicate: string;
  value: string;
  rule_ids: string[];
}

export interface ViolationEntry {
  kind: string;
  subject: string;
  statements: string[];
}

export interface Suggestions {
  suspected: SuspectedEntry[];
  recommended_tests: TestEntry[];
  prescriptions: PrescriptionEntry[];
  findings: FindingEntry[];
  violations: ViolationEntry[];
  rules?: Record<string, { text: string; source: string; note: string }>;
}

export interface PropertyDecl {
  iri: string;
  name: string;
  label: string | null;
  domain: string | null;
  range: string | null;
}

export interface KbProperties {
  data_properties: PropertyDecl[];
  object_properties: PropertyDecl[];
  patient_class: string;
}

export interface ProvenanceEntry {
  rule_id: string;
  rule_text: string;
  source: string;
  bindings: Record<string, string>;
}

export interface Explanation {
  fact: { s: string; p: string } & TermPayload;
  provenance: ProvenanceEntry[];
}

export interface ApiError {
  code: string;
  message: string;
  detail: unknown;
}

export function localName(iri: string): string {
  const hash = iri.lastIndexOf("#");
  const slash = iri.lastIndexOf("/");
  return iri.slice(Math.max(hash, slash) + 1);
}
