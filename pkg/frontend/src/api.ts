import type {
  AnglesResponse,
  DatasetResponse,
  EncodeResponse,
  ExplainResponse,
  FspResponse,
  JlEstimateResponse,
  Pairing,
  RectRuleJson,
  RuleEvalResponse,
  SessionCreated,
  TrainResponse,
} from "./types";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** Thin typed wrapper over the service; the injectable fetch makes the
 * client (and everything built on it) testable with controlled latency. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const payload = await response.json();
        detail = typeof payload.detail === "string" ? payload.detail : detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(csv: string, labelColumn: string | number): Promise<SessionCreated> {
    return this.request("POST", "/sessions", { csv, label_column: labelColumn });
  }

  getDataset(sessionId: string): Promise<DatasetResponse> {
    return this.request("GET", `/sessions/${sessionId}/dataset`);
  }

  encode(
    sessionId: string,
    system: string,
    pairing: Pairing | null,
    datasetVersion: number | null,
  ): Promise<EncodeResponse> {
    return this.request("POST", `/sessions/${sessionId}/encode`, {
      system,
      pairing: pairing ?? undefined,
      dataset_version: datasetVersion ?? undefined,
    });
  }

  rulesEval(
    sessionId: string,
    rule: RectRuleJson,
    pairing: Pairing | null,
    datasetVersion: number | null,
  ): Promise<RuleEvalResponse> {
    return this.request("POST", `/sessions/${sessionId}/rules/eval`, {
      rule,
      pairing: pairing ?? undefined,
      dataset_version: datasetVersion ?? undefined,
    });
  }

  fsp(
    sessionId: string,
    seed: number,
    datasetVersion: number | null,
  ): Promise<FspResponse> {
    return this.request("POST", `/sessions/${sessionId}/fsp`, {
      seed,
      dataset_version: datasetVersion ?? undefined,
    });
  }

  train(sessionId: string, seed: number): Promise<TrainResponse> {
    return this.request("POST", `/sessions/${sessionId}/glcl/train`, { seed });
  }

  angles(
    sessionId: string,
    angles: number[],
    signs: number[] | null,
    threshold: number | null,
  ): Promise<AnglesResponse> {
    return this.request("POST", `/sessions/${sessionId}/glcl/angles`, {
      angles,
      signs: signs ?? undefined,
      threshold: threshold ?? undefined,
    });
  }

  explain(sessionId: string, row: number, k: number): Promise<ExplainResponse> {
    return this.request("POST", `/sessions/${sessionId}/explain`, { row, k });
  }

  jlMinDim(m: number, eps: number): Promise<JlEstimateResponse> {
    return this.request("GET", `/jl/min-dim?m=${m}&eps=${eps}`);
  }

  jlMaxPoints(k: number, eps: number): Promise<{ max_points: number }> {
    return this.request("GET", `/jl/max-points?k=${k}&eps=${eps}`);
  }

  renderUrl(sessionId: string, kind: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/render/${kind}`;
  }
}
