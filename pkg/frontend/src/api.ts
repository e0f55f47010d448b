// Thin fetch client for the case service. Every non-2xx response carries
// one ApiError body, which we surface as an exception with its code.

import type {
  ApiError,
  CaseView,
  Explanation,
  KbProperties,
  Suggestions,
  TermPayload,
} from "./model.js";

export class ServiceError extends Error {
  code: string;
  detail: unknown;

  constructor(err: ApiError, readonly status: number) {
    super(err.message);
    this.code = err.code;
    this.detail = err.detail;
  }
}

export class Client {
  constructor(public baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl.replace(/\/$/, "") + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ServiceError(payload as ApiError, response.status);
    }
    return payload as T;
  }

  health(): Promise<{ status: string; kb: { rules: number } }> {
    return this.request("GET", "/health");
  }

  kbProperties(): Promise<KbProperties> {
    return this.request("GET", "/kb/properties");
  }

  createCase(caseId: string): Promise<CaseView> {
    return this.request("POST", "/cases", { case_id: caseId });
  }

  getCase(caseId: string): Promise<CaseView> {
    return this.request("GET", `/cases/${encodeURIComponent(caseId)}`);
  }

  assert(caseId: string, p: string, o: string, datatype: string): Promise<TermPayload> {
    return this.request("POST", `/cases/${encodeURIComponent(caseId)}/assertions`, {
      p,
      o,
      datatype,
    });
  }

  infer(caseId: string): Promise<Suggestions> {
    return this.request("POST", `/cases/${encodeURIComponent(caseId)}/infer`);
  }

  explain(
    caseId: string,
    p: string,
    o: string,
    datatype: string,
  ): Promise<Explanation> {
    const params = new URLSearchParams({ p, o, datatype });
    return this.request("GET", `/cases/${encodeURIComponent(caseId)}/explain?${params}`);
  }
}
