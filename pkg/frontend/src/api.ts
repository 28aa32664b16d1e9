/**
 * Thin HTTP client for the annotation service.
 *
 * Transport failures and 5xx responses are retried with exponential
 * backoff; 4xx responses are surfaced immediately as ApiError with the
 * service's machine-readable code and detail. Submissions always carry an
 * idempotency token, which is what makes retrying POST /ratings safe.
 */

import {
  ExportPayload,
  Progress,
  Score,
  SubmitAck,
  TaskPayload,
  parseExportPayload,
  parseProgress,
  parseSubmitAck,
  parseTaskPayload,
} from "./types.js";

/** The subset of the fetch contract the client relies on (injectable in tests). */
export interface ResponseLike {
  ok: boolean;
  status: number;
  statusText: string;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<ResponseLike>;

/** A non-2xx response carrying the service's error body. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: string;
  readonly extra: Record<string, unknown>;

  constructor(status: number, code: string, detail: string, extra: Record<string, unknown> = {}) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.detail = detail;
    this.extra = extra;
  }
}

/** The service could not be reached at all (connection refused, timeout, ...). */
export class NetworkError extends Error {
  constructor(message: string, cause?: unknown) {
    super(message, { cause });
    this.name = "NetworkError";
  }
}

export interface RatingSubmission {
  rater_id: string;
  company_id: string;
  month: string;
  score: Score;
  idempotency_token: string;
}

export interface ClientOptions {
  /** Service origin, e.g. "http://127.0.0.1:8800". */
  baseUrl: string;
  /** Bearer token: the rater's own, or the admin token for exports. */
  token: string;
  fetchImpl?: FetchLike;
  /** Extra attempts after the first failure; 0 disables retries. */
  maxRetries?: number;
  baseDelayMs?: number;
}

function delay(ms: number): Promise<void> {
  if (ms <= 0) {
    return Promise.resolve();
  }
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function errorFromResponse(response: ResponseLike): Promise<ApiError> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // Non-JSON error body; fall through to the status-only error.
  }
  if (typeof body === "object" && body !== null) {
    const err = (body as Record<string, unknown>).error;
    if (typeof err === "object" && err !== null) {
      const { code, detail, ...extra } = err as Record<string, unknown>;
      if (typeof code === "string" && typeof detail === "string") {
        return new ApiError(response.status, code, detail, extra);
      }
    }
  }
  return new ApiError(response.status, `http_${response.status}`, response.statusText || "request failed");
}

export class AnnotationClient {
  private readonly baseUrl: string;
  private readonly token: string;
  private readonly fetchImpl: FetchLike;
  private readonly maxRetries: number;
  private readonly baseDelayMs: number;

  constructor(options: ClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, "");
    this.token = options.token;
    this.fetchImpl = options.fetchImpl ?? (globalThis.fetch as unknown as FetchLike);
    this.maxRetries = options.maxRetries ?? 2;
    this.baseDelayMs = options.baseDelayMs ?? 250;
  }

  async nextTask(raterId: string): Promise<TaskPayload> {
    const data = await this.request("GET", "/tasks/next", { rater: raterId });
    return parseTaskPayload(data);
  }

  async fetchProgress(raterId: string): Promise<Progress> {
    const data = await this.request("GET", "/progress", { rater: raterId });
    return parseProgress(data);
  }

  async submitRating(submission: RatingSubmission): Promise<SubmitAck> {
    const data = await this.request("POST", "/ratings", undefined, submission);
    return parseSubmitAck(data);
  }

  async exportAssessments(): Promise<ExportPayload> {
    const data = await this.request("GET", "/export");
    return parseExportPayload(data);
  }

  private async request(
    method: "GET" | "POST",
    path: string,
    query?: Record<string, string>,
    body?: unknown,
  ): Promise<unknown> {
    let url = this.baseUrl + path;
    if (query) {
      url += `?${new URLSearchParams(query)}`;
    }
    const headers: Record<string, string> = { Authorization: `Bearer ${this.token}` };
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      init.body = JSON.stringify(body);
    }

    let lastFailure: unknown = null;
    for (let attempt = 0; attempt <= this.maxRetries; attempt++) {
      if (attempt > 0) {
        await delay(this.baseDelayMs * 2 ** (attempt - 1));
      }
      let response: ResponseLike;
      try {
        response = await this.fetchImpl(url, init);
      } catch (cause) {
        lastFailure = cause;
        continue;
      }
      if (response.ok) {
        return response.json();
      }
      if (response.status >= 500) {
        lastFailure = await errorFromResponse(response);
        continue;
      }
      throw await errorFromResponse(response);
    }
    if (lastFailure instanceof ApiError) {
      throw lastFailure;
    }
    throw new NetworkError("the annotation service could not be reached", lastFailure);
  }
}
