// Thin typed client for the service JSON API. Bodies pass through verbatim;
// nothing is computed here, so every number shown in the UI is a server
// number (the contract tests pin this module against recorded fixtures).

import type {
  AlignmentMap,
  ApiErrorBody,
  BankCandidate,
  GenerateResult,
  LockSpan,
  ReadabilityReport,
  Replacement,
  RunReportRow,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly linkIds: number[];

  constructor(status: number, body: ApiErrorBody) {
    super(body.message ?? body.code);
    this.status = status;
    this.code = body.code;
    this.linkIds = body.link_ids ?? [];
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export type BankFilters = {
  pair_id?: string;
  provider?: string;
  method?: string;
  min_score?: number;
  max_score?: number;
};

export type GenerateRequest = {
  pair_id: string;
  providers: string[];
  method?: string;
  k?: number;
};

export type MergeRequest = {
  candidate: string;
  replacements: Replacement[];
  alignment_digest?: string;
};

const query = (params: Record<string, string | number | undefined>): string => {
  const search = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) search.set(key, String(value));
  }
  const text = search.toString();
  return text ? `?${text}` : "";
};

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      const parsed = (await response.json().catch(() => ({ code: "error" }))) as ApiErrorBody;
      throw new ApiError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  score(text: string): Promise<ReadabilityReport> {
    return this.request("POST", "/score", { text });
  }

  createSession(pairId: string): Promise<SessionView> {
    return this.request("POST", "/sessions", { pair_id: pairId });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  async bank(filters: BankFilters = {}): Promise<BankCandidate[]> {
    const body = await this.request<{ candidates: BankCandidate[] }>(
      "GET",
      `/bank${query(filters)}`,
    );
    return body.candidates;
  }

  align(base: string, candidate: string): Promise<AlignmentMap> {
    return this.request("POST", "/align", { base, candidate });
  }

  merge(sessionId: string, body: MergeRequest): Promise<SessionView> {
    return this.request("POST", `/sessions/${sessionId}/merge`, body);
  }

  setLocks(sessionId: string, spans: LockSpan[]): Promise<{ ok: boolean; locks: number }> {
    return this.request("POST", `/sessions/${sessionId}/locks`, { spans });
  }

  undo(sessionId: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${sessionId}/undo`);
  }

  generate(body: GenerateRequest): Promise<GenerateResult> {
    return this.request("POST", "/generate", body);
  }

  async runReport(runId: string): Promise<RunReportRow[]> {
    const body = await this.request<{ reports: RunReportRow[] }>(
      "GET",
      `/runs/${runId}/report`,
    );
    return body.reports;
  }

  async scatterCsv(runId: string): Promise<string> {
    const response = await this.fetchFn(`${this.base}/runs/${runId}/scatter`, { method: "GET" });
    if (!response.ok) {
      const parsed = (await response.json().catch(() => ({ code: "error" }))) as ApiErrorBody;
      throw new ApiError(response.status, parsed);
    }
    return response.text();
  }
}
