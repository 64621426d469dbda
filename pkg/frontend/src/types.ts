// Payload shapes of the review-service HTTP API.

export interface QueueItem {
  example_id: number;
  score: number;
  status: "PENDING" | "REVIEWED";
}

export interface TokenView {
  text: string;
  ai_tag: string;
  confidence: number;
}

export interface ExampleDetail {
  tokens: TokenView[];
  current_tags: string[];
  status: "PENDING" | "REVIEWED";
}

export interface Progress {
  reviewed: number;
  pending: number;
}

export interface ExportResult extends Progress {
  path: string;
}

export interface Schema {
  entity_types: string[];
}

export interface SubmitAck {
  revision: number;
}

/** Error body: {"error": {"code": ..., "message": ...}} with 4xx/5xx status. */
export interface ErrorBody {
  error: { code: string; message: string };
}
