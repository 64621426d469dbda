import type {
  ExampleDetail,
  ExportResult,
  Progress,
  QueueItem,
  Schema,
  SubmitAck,
} from "./types.js";

/** Server rejected the request (4xx/5xx with a structured body). */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Could not reach the service at all. */
export class ConnectionError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConnectionError";
  }
}

/** The service surface the UI consumes; every state change goes through it. */
export interface ReviewService {
  queue(): Promise<QueueItem[]>;
  example(exampleId: number): Promise<ExampleDetail>;
  submit(exampleId: number, tags: string[], annotator: string): Promise<SubmitAck>;
  progress(): Promise<Progress>;
  schema(): Promise<Schema>;
  exportCorpus(): Promise<ExportResult>;
}

export class ReviewApi implements ReviewService {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ConnectionError(`service unreachable: ${String(err)}`);
    }
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const error = (body as { error?: { code: string; message: string } })?.error;
      throw new ApiError(
        response.status,
        error?.code ?? "unknown",
        error?.message ?? `HTTP ${response.status}`,
      );
    }
    return body as T;
  }

  queue(): Promise<QueueItem[]> {
    return this.request("/api/queue");
  }

  example(exampleId: number): Promise<ExampleDetail> {
    return this.request(`/api/examples/${exampleId}`);
  }

  submit(exampleId: number, tags: string[], annotator: string): Promise<SubmitAck> {
    return this.request(`/api/examples/${exampleId}/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ tags, annotator }),
    });
  }

  progress(): Promise<Progress> {
    return this.request("/api/progress");
  }

  schema(): Promise<Schema> {
    return this.request("/api/schema");
  }

  exportCorpus(): Promise<ExportResult> {
    return this.request("/api/export", { method: "POST" });
  }
}
