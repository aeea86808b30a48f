/** Typed client for the annotation service HTTP interface.
 *
 * Mirrors the JSON payloads served by `icctl serve`.  All methods reject
 * with an ApiError carrying the service's error envelope
 * {code, message, detail} and the HTTP status.
 */

export type Phase =
  | "pretraining"
  | "awaiting_labels"
  | "fine_tuning"
  | "idle"
  | "error";

export interface SessionStatus {
  session_id: string;
  phase: Phase;
  iteration: number;
  labeled_count: number;
  labeled_fraction: number;
  pool_size: number;
  class_names: string[];
  strategy: string;
  last_error: string | null;
}

export interface QueryBatch {
  iteration: number;
  queried_ids: string[];
}

/** Parallel arrays, one entry per pool sample. */
export interface EmbeddingView {
  ids: string[];
  points: [number, number][];
  cluster: number[];
  labeled: boolean[];
  label: (number | null)[];
  max_prob: number[];
  entropy: number[];
  queried: boolean[];
}

export interface HistoryRecord {
  iteration: number;
  selected_ids: string[];
  labeled_count: number;
  labeled_fraction: number;
  test_accuracy: number | null;
}

export interface SamplePayload {
  id: string;
  label: string | null;
  label_index: number | null;
  num_frames: number;
  num_keypoints: number;
  dims: number;
  keypoints: number[][][];
  frames_2d: number[][][];
}

export interface CreateSessionRequest {
  dataset: string;
  train_split?: string;
  test_split?: string | null;
  class_names?: string[] | null;
  model?: Record<string, unknown>;
  loop?: Record<string, unknown>;
}

export interface SubmitResult {
  accepted: number;
  phase: Phase;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ServiceApi {
  createSession(req: CreateSessionRequest): Promise<SessionStatus>;
  listSessions(): Promise<string[]>;
  status(sessionId: string): Promise<SessionStatus>;
  queries(sessionId: string): Promise<QueryBatch>;
  submitLabels(
    sessionId: string,
    labels: Record<string, number | string>,
  ): Promise<SubmitResult>;
  embedding(sessionId: string): Promise<EmbeddingView>;
  history(sessionId: string): Promise<HistoryRecord[]>;
  sample(sessionId: string, sampleId: string): Promise<SamplePayload>;
}

export class HttpApi implements ServiceApi {
  /** @param base origin prefix, "" when served from the same host */
  constructor(private readonly base: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.base + path, init);
    const text = await resp.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = null; // non-JSON body, fall back to status text below
      }
    }
    if (!resp.ok) {
      const envelope = (data ?? {}) as {
        code?: string;
        message?: string;
        detail?: unknown;
      };
      throw new ApiError(
        resp.status,
        envelope.code ?? "http_error",
        envelope.message ?? `${resp.status} ${resp.statusText}`,
        envelope.detail ?? null,
      );
    }
    return data as T;
  }

  createSession(req: CreateSessionRequest): Promise<SessionStatus> {
    return this.request("POST", "/sessions", req);
  }

  async listSessions(): Promise<string[]> {
    const data = await this.request<{ sessions: string[] }>("GET", "/sessions");
    return data.sessions;
  }

  status(sessionId: string): Promise<SessionStatus> {
    return this.request("GET", `/sessions/${sessionId}/status`);
  }

  queries(sessionId: string): Promise<QueryBatch> {
    return this.request("GET", `/sessions/${sessionId}/queries`);
  }

  submitLabels(
    sessionId: string,
    labels: Record<string, number | string>,
  ): Promise<SubmitResult> {
    return this.request("POST", `/sessions/${sessionId}/labels`, { labels });
  }

  embedding(sessionId: string): Promise<EmbeddingView> {
    return this.request("GET", `/sessions/${sessionId}/embedding`);
  }

  async history(sessionId: string): Promise<HistoryRecord[]> {
    const data = await this.request<{ records: HistoryRecord[] }>(
      "GET",
      `/sessions/${sessionId}/history`,
    );
    return data.records;
  }

  sample(sessionId: string, sampleId: string): Promise<SamplePayload> {
    return this.request("GET", `/sessions/${sessionId}/samples/${sampleId}`);
  }
}
