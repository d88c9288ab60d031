/** Thin typed client for the octoscore service; all numbers come from here. */

import type { ExperimentDoc, RunDetail, RunRequest, RunSummary } from "./model.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StudioApi {
  constructor(
    private readonly baseUrl: string,
    private token: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    };
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const parsed = (await response.json()) as { detail?: unknown };
        if (parsed && parsed.detail !== undefined) {
          detail = typeof parsed.detail === "string" ? parsed.detail : JSON.stringify(parsed.detail);
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listExperiments(): Promise<ExperimentDoc[]> {
    return this.request("GET", "/experiments");
  }

  getExperiment(id: string): Promise<ExperimentDoc> {
    return this.request("GET", `/experiments/${encodeURIComponent(id)}`);
  }

  putExperiment(doc: ExperimentDoc): Promise<ExperimentDoc> {
    return this.request("PUT", `/experiments/${encodeURIComponent(doc.id)}`, doc);
  }

  deleteExperiment(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/experiments/${encodeURIComponent(id)}`);
  }

  startRun(request: RunRequest): Promise<{ run_id: string; status: string }> {
    return this.request("POST", "/runs", request);
  }

  listRuns(): Promise<RunSummary[]> {
    return this.request("GET", "/runs");
  }

  getRun(runId: string): Promise<RunDetail> {
    return this.request("GET", `/runs/${encodeURIComponent(runId)}`);
  }

  reportUrl(runId: string): string {
    return `${this.baseUrl}/runs/${encodeURIComponent(runId)}/report.csv`;
  }
}
