// The case worksheet: new case -> symptom checklist -> Infer ->
// suggestions -> test-result entry -> re-Infer.
//
// All state lives on the server; after every mutation the view is
// re-fetched, so a browser refresh reconstructs the same worksheet from
// GET /cases/{id}. Derived items are rendered with the "derived"
// highlight and always carry at least one rule-id badge; clicking one
// opens the explanation drawer with the verbatim rule text and variable
// bindings from GET .../explain.

import { Client, ServiceError } from "./api.js";
import {
  CaseView,
  FindingEntry,
  KbProperties,
  PrescriptionEntry,
  PropertyDecl,
  Suggestions,
  SuspectedEntry,
  TestEntry,
  localName,
} from "./model.js";

interface DrawerState {
  title: string;
  provenance: Array<{ rule_id: string; rule_text: string; source: string; bindings: Record<string, string> }>;
}

export class Worksheet {
  client: Client;
  view: CaseView | null = null;
  properties: KbProperties | null = null;
  drawer: DrawerState | null = null;
  message = "";

  constructor(private root: HTMLElement, apiBase: string) {
    this.client = new Client(apiBase);
    this.render();
  }

  setApiBase(url: string): void {
    this.client = new Client(url);
  }

  // -- flow actions --------------------------------------------------------

  async newCase(caseId: string): Promise<void> {
    await this.guard(async () => {
      this.view = await this.client.createCase(caseId);
      await this.ensureProperties();
    });
  }

  async openCase(caseId: string): Promise<void> {
    await this.guard(async () => {
      this.view = await this.client.getCase(caseId);
      await this.ensureProperties();
    });
  }

  async recordSymptoms(): Promise<void> {
    const checked = Array.from(
      this.root.querySelectorAll<HTMLInputElement>(".symptom-checkbox:checked"),
    );
    await this.guard(async () => {
      for (const box of checked) {
        await this.client.assert(this.caseId(), box.dataset.iri!, "true", "boolean");
      }
      await this.refresh();
    });
  }

  async assertResult(propertyIri: string, value: string): Promise<void> {
    await this.guard(async () => {
      await this.client.assert(this.caseId(), propertyIri, value, "string");
      await this.refresh();
    });
  }

  async infer(): Promise<void> {
    await this.guard(async () => {
      await this.client.infer(this.caseId());
      await this.refresh();
    });
  }

  async explainSuggestion(p: string, o: string, datatype: string, title: string): Promise<void> {
    await this.guard(async () => {
      const explanation = await this.client.explain(this.caseId(), p, o, datatype);
      this.drawer = { title, provenance: explanation.provenance };
    });
  }

  closeDrawer(): void {
    this.drawer = null;
    this.render();
  }

  private caseId(): string {
    if (!this.view) throw new Error("no case open");
    return this.view.case_id;
  }

  private async refresh(): Promise<void> {
    // optimistic re-fetch: the server is the only source of truth
    this.view = await this.client.getCase(this.caseId());
  }

  private async ensureProperties(): Promise<void> {
    if (!this.properties) {
      this.properties = await this.client.kbProperties();
    }
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    try {
      this.message = "";
      await action();
    } catch (err) {
      if (err instanceof ServiceError) {
        this.message = `${err.code}: ${err.message}`;
        if (err.code === "duplicate_case" || err.status === 409) {
          // stale view: someone else owns this case id; re-fetch it
          try {
            this.view = await this.client.getCase(this.idInputValue());
            await this.ensureProperties();
          } catch {
            /* keep the original error message */
          }
        }
      } else {
        this.message = String(err);
      }
    }
    this.render();
  }

  private idInputValue(): string {
    const input = this.root.querySelector<HTMLInputElement>("#case-id-input");
    return input ? input.value.trim() : "";
  }

  // -- property-driven forms -------------------------------------------------

  symptomProperties(): PropertyDecl[] {
    if (!this.properties) return [];
    const patient = this.properties.patient_class;
    return this.properties.data_properties.filter(
      (p) => p.range === "boolean" && p.domain === patient,
    );
  }

  resultProperties(): PropertyDecl[] {
    if (!this.properties) return [];
    return this.properties.data_properties.filter(
      (p) => p.range === "string" && localName(p.iri).includes("Result"),
    );
  }

  // -- rendering ----------------------------------------------------------------

  render(): void {
    this.root.innerHTML = "";
    this.root.appendChild(this.header());
    if (this.message) {
      this.root.appendChild(el("div", { id: "message", class: "message" }, this.message));
    }
    if (!this.view) {
      this.root.appendChild(
        el("p", { class: "hint" }, "Create or open a case to start the worksheet."),
      );
      return;
    }
    const columns = el("div", { class: "columns" });
    columns.appendChild(this.factsColumn());
    columns.appendChild(this.suggestionsColumn());
    this.root.appendChild(columns);
    if (this.drawer) {
      this.root.appendChild(this.drawerPanel(this.drawer));
    }
  }

  private header(): HTMLElement {
    const caseInput = el("input", {
      id: "case-id-input",
      placeholder: "case id, e.g. RK",
    }) as HTMLInputElement;
    const newBtn = el("button", { id: "new-case-btn" }, "New case");
    newBtn.addEventListener("click", () => void this.newCase(caseInput.value.trim()));
    const openBtn = el("button", { id: "open-case-btn" }, "Open");
    openBtn.addEventListener("click", () => void this.openCase(caseInput.value.trim()));
    const apiInput = el("input", {
      id: "api-base-input",
      value: this.client.baseUrl,
      title: "API base URL",
    }) as HTMLInputElement;
    apiInput.addEventListener("change", () => this.setApiBase(apiInput.value.trim()));
    const title = this.view
      ? `Case ${this.view.case_id}`
      : "VBD case worksheet";
    return el(
      "header",
      {},
      el("h1", { id: "case-title" }, title),
      el("div", { class: "controls" }, caseInput, newBtn, openBtn, apiInput),
    );
  }

  private factsColumn(): HTMLElement {
    const view = this.view!;
    const column = el("section", { class: "column", id: "facts-column" });

    const checklist = el("div", { id: "symptom-checklist" });
    const asserted = new Set(view.facts.symptoms.map((f) => f.p));
    for (const prop of this.symptomProperties()) {
      const already = asserted.has(prop.iri);
      const box = el("input", {
        type: "checkbox",
        class: "symptom-checkbox",
        id: `symptom-${localName(prop.iri)}`,
      }) as HTMLInputElement;
      box.dataset.iri = prop.iri;
      if (already) {
        box.checked = true;
        box.disabled = true;
      }
      checklist.appendChild(
        el("label", { class: already ? "asserted" : "" }, box, prop.label ?? localName(prop.iri)),
      );
    }
    const recordBtn = el("button", { id: "record-symptoms-btn" }, "Record symptoms");
    recordBtn.addEventListener("click", () => void this.recordSymptoms());

    const resultSelect = el("select", { id: "result-prop-select" }) as HTMLSelectElement;
    for (const prop of this.resultProperties()) {
      resultSelect.appendChild(
        el("option", { value: prop.iri }, prop.label ?? localName(prop.iri)),
      );
    }
    const resultValue = el("input", {
      id: "result-value-input",
      placeholder: "positive / negative",
    }) as HTMLInputElement;
    const resultBtn = el("button", { id: "assert-result-btn" }, "Assert result");
    resultBtn.addEventListener("click", () =>
      void this.assertResult(resultSelect.value, resultValue.value.trim()),
    );

    column.append(
      el("h2", {}, "Symptoms"),
      checklist,
      recordBtn,
      el("h2", {}, "Test results"),
      el("div", { id: "result-entry" }, resultSelect, resultValue, resultBtn),
      el("h2", {}, "Recorded facts"),
      this.factsList(),
    );
    return column;
  }

  private factsList(): HTMLElement {
    const view = this.view!;
    const list = el("ul", { id: "facts-list" });
    const groups: Array<[string, typeof view.facts.symptoms]> = [
      ["demographics", view.facts.demographics],
      ["symptoms", view.facts.symptoms],
      ["test_results", view.facts.test_results],
      ["other", view.facts.other],
    ];
    for (const [group, entries] of groups) {
      for (const fact of entries) {
        list.appendChild(
          el("li", { class: `fact ${group}` }, `${fact.name} = ${fact.o}`),
        );
      }
    }
    return list;
  }

  private suggestionsColumn(): HTMLElement {
    const column = el("section", { class: "column", id: "suggestions-column" });
    const inferBtn = el("button", { id: "infer-btn" }, "Infer");
    inferBtn.addEventListener("click", () => void this.infer());
    column.append(el("h2", {}, "Suggestions"), inferBtn);

    const suggestions = this.view!.suggestions;
    const panel = el("div", { id: "suggestions" });
    if (!suggestions) {
      panel.appendChild(el("p", { class: "hint" }, "Not inferred yet."));
    } else if (this.isEmpty(suggestions)) {
      panel.appendChild(el("p", { id: "no-findings" }, "No findings for the recorded facts."));
    } else {
      panel.append(
        this.bucket("Suspected diseases", suggestions.suspected.map((s) => this.suspectedItem(s))),
        this.bucket("Recommended tests", suggestions.recommended_tests.map((t) => this.testItem(t))),
        this.bucket("Prescriptions", suggestions.prescriptions.map((p) => this.prescriptionItem(p))),
        this.bucket("Findings", suggestions.findings.map((f) => this.findingItem(f))),
        this.bucket(
          "Consistency warnings",
          suggestions.violations.map((v) =>
            el("li", { class: "violation-item" }, `${v.kind}: ${localName(v.subject)}`),
          ),
        ),
      );
    }
    column.appendChild(panel);
    return column;
  }

  private isEmpty(s: Suggestions): boolean {
    return (
      s.suspected.length === 0 &&
      s.recommended_tests.length === 0 &&
      s.prescriptions.length === 0 &&
      s.findings.length === 0
    );
  }

  private bucket(title: string, items: HTMLElement[]): HTMLElement {
    const section = el("div", { class: "bucket" });
    if (items.length === 0) return section;
    section.appendChild(el("h3", {}, title));
    const list = el("ul", {});
    items.forEach((item) => list.appendChild(item));
    section.appendChild(list);
    return section;
  }

  private suspectedItem(entry: SuspectedEntry): HTMLElement {
    return this.derivedItem(
      "suspected-item",
      localName(entry.disease),
      entry.rule_ids,
      () => this.explainSuggestion(entry.via, "true", "boolean", localName(entry.disease)),
    );
  }

  private testItem(entry: TestEntry): HTMLElement {
    return this.derivedItem(
      "test-item",
      localName(entry.test),
      entry.rule_ids,
      () => this.explainSuggestion("undergoes", entry.test, "iri", localName(entry.test)),
    );
  }

  private prescriptionItem(entry: PrescriptionEntry): HTMLElement {
    const details: string[] = [];
    if (entry.duration_days !== null) details.push(`${entry.duration_days} day(s)`);
    if (entry.on_day !== null) details.push(`on day ${entry.on_day}`);
    const label = localName(entry.drug) + (details.length ? ` (${details.join(", ")})` : "");
    return this.derivedItem("prescription-item", label, entry.rule_ids, () =>
      this.explainSuggestion("is_Prescribed", entry.drug, "iri", localName(entry.drug)),
    );
  }

  private findingItem(entry: FindingEntry): HTMLElement {
    const label = `${localName(entry.predicate)} = ${entry.value}`;
    return this.derivedItem("finding-item", label, entry.rule_ids, () =>
      this.explainSuggestion(entry.predicate, entry.value.replace(/^"|"$/g, ""),
        entry.value.startsWith('"') ? "string" : "boolean", localName(entry.predicate)),
    );
  }

  private derivedItem(
    kind: string,
    label: string,
    ruleIds: string[],
    onExplain: () => Promise<void>,
  ): HTMLElement {
    const item = el("li", { class: `derived ${kind}` }, el("span", { class: "label" }, label));
    for (const ruleId of ruleIds) {
      item.appendChild(el("span", { class: "rule-badge" }, ruleId));
    }
    const explainBtn = el("button", { class: "explain-btn" }, "why?");
    explainBtn.addEventListener("click", () => void onExplain());
    item.appendChild(explainBtn);
    return item;
  }

  private drawerPanel(drawer: DrawerState): HTMLElement {
    const panel = el("aside", { id: "drawer" }, el("h3", {}, `Why ${drawer.title}?`));
    for (const entry of drawer.provenance) {
      const block = el("div", { class: "provenance" });
      block.appendChild(el("code", { class: "rule-text" }, `${entry.rule_id}: ${entry.rule_text}`));
      const table = el("table", { class: "bindings" });
      for (const [variable, value] of Object.entries(entry.bindings)) {
        table.appendChild(
          el("tr", { class: "binding-row" }, el("td", {}, variable), el("td", {}, value)),
        );
      }
      block.appendChild(table);
      panel.appendChild(block);
    }
    const closeBtn = el("button", { id: "drawer-close" }, "Close");
    closeBtn.addEventListener("click", () => this.closeDrawer());
    panel.appendChild(closeBtn);
    return panel;
  }
}

function el(tag: string, attrs: Record<string, string> = {}, ...children: Array<HTMLElement | string>): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value !== "") node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child instanceof HTMLElement ? child : document.createTextNode(child));
  }
  return node;
}
