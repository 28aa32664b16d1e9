import { describe, expect, it } from "vitest";

import { AnnotationClient, ApiError, NetworkError } from "../src/api.js";
import { PayloadError } from "../src/types.js";
import { FakeFetch, jsonResponse } from "./helpers.js";

const RAW_TASK = {
  done: false,
  task: {
    company_id: "c01",
    month: "2023-06",
    rows: [{ date: "2023-06-05", time: "10:00", details: "Filing: synthetic event." }],
  },
  rubric: {
    preamble: "Assign one score.",
    criteria: { "1": "a", "2": "b", "3": "c", "4": "d", "5": "e" },
  },
  progress: { completed: 0, total: 10 },
};

const SUBMISSION = {
  rater_id: "alice",
  company_id: "c01",
  month: "2023-06",
  score: 4 as const,
  idempotency_token: "tok-1",
};

const RAW_ACK = { ok: true, progress: { completed: 1, total: 10 }, resubmission: false, duplicate: false };

function makeClient(fake: FakeFetch, overrides: { maxRetries?: number; token?: string } = {}): AnnotationClient {
  return new AnnotationClient({
    baseUrl: "http://svc.test/",
    token: overrides.token ?? "tok-alice",
    fetchImpl: fake.fetch,
    maxRetries: overrides.maxRetries ?? 0,
    baseDelayMs: 0,
  });
}

function headerValue(init: RequestInit | undefined, name: string): string | undefined {
  return (init?.headers as Record<string, string> | undefined)?.[name];
}

describe("request shape", () => {
  it("sends the bearer token and rater query to /tasks/next", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(200, RAW_TASK));
    const payload = await makeClient(fake).nextTask("alice");

    expect(fake.calls).toHaveLength(1);
    expect(fake.calls[0].url).toBe("http://svc.test/tasks/next?rater=alice");
    expect(headerValue(fake.calls[0].init, "Authorization")).toBe("Bearer tok-alice");
    expect(payload.done).toBe(false);
    if (!payload.done) {
      expect(payload.task.company_id).toBe("c01");
      expect(payload.task.rows).toHaveLength(1);
      expect(payload.rubric.criteria["3"]).toBe("c");
    }
  });

  it("posts a submission body verbatim with a JSON content type", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(200, RAW_ACK));
    const ack = await makeClient(fake).submitRating(SUBMISSION);

    expect(fake.calls[0].url).toBe("http://svc.test/ratings");
    expect(fake.calls[0].init?.method).toBe("POST");
    expect(headerValue(fake.calls[0].init, "Content-Type")).toBe("application/json");
    expect(JSON.parse(String(fake.calls[0].init?.body))).toEqual(SUBMISSION);
    expect(ack).toEqual({ ok: true, progress: { completed: 1, total: 10 }, resubmission: false, duplicate: false });
  });

  it("fetches progress for a rater", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(200, { completed: 3, total: 10 }));
    const progress = await makeClient(fake).fetchProgress("bob");

    expect(fake.calls[0].url).toBe("http://svc.test/progress?rater=bob");
    expect(progress).toEqual({ completed: 3, total: 10 });
  });

  it("parses an export payload with the admin token", async () => {
    const fake = new FakeFetch();
    fake.respondWith(
      jsonResponse(200, {
        assessments: [
          { company_id: "c01", month: "2023-06", expert_scores: [3, 4], consensus: 3 },
          { company_id: "c02", month: "2023-06", expert_scores: [5, 5], consensus: 5 },
        ],
        inter_rater: { kappa: 0.25, agreement: 0.5 },
      }),
    );
    const payload = await makeClient(fake, { token: "tok-admin" }).exportAssessments();

    expect(fake.calls[0].url).toBe("http://svc.test/export");
    expect(headerValue(fake.calls[0].init, "Authorization")).toBe("Bearer tok-admin");
    expect(payload.assessments).toHaveLength(2);
    expect(payload.assessments[0].consensus).toBe(3);
    expect(payload.inter_rater).toEqual({ kappa: 0.25, agreement: 0.5 });
  });

  it("accepts null inter-rater statistics", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(200, { assessments: [], inter_rater: { kappa: null, agreement: null } }));
    const payload = await makeClient(fake).exportAssessments();
    expect(payload.inter_rater).toEqual({ kappa: null, agreement: null });
  });

  it("parses a done payload", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(200, { done: true, progress: { completed: 10, total: 10 } }));
    const payload = await makeClient(fake).nextTask("alice");
    expect(payload).toEqual({ done: true, progress: { completed: 10, total: 10 } });
  });
});

describe("payload validation", () => {
  it("rejects a task with zero rows", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(200, { ...RAW_TASK, task: { ...RAW_TASK.task, rows: [] } }));
    await expect(makeClient(fake).nextTask("alice")).rejects.toBeInstanceOf(PayloadError);
  });

  it("rejects a rubric missing a criterion", async () => {
    const fake = new FakeFetch();
    const rubric = { preamble: "Assign.", criteria: { "1": "a", "2": "b", "3": "c", "4": "d" } };
    fake.respondWith(jsonResponse(200, { ...RAW_TASK, rubric }));
    await expect(makeClient(fake).nextTask("alice")).rejects.toBeInstanceOf(PayloadError);
  });

  it("rejects an ack without a progress object", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(200, { ok: true, resubmission: false, duplicate: false }));
    await expect(makeClient(fake).submitRating(SUBMISSION)).rejects.toBeInstanceOf(PayloadError);
  });

  it("rejects an out-of-scale consensus in an export", async () => {
    const fake = new FakeFetch();
    fake.respondWith(
      jsonResponse(200, {
        assessments: [{ company_id: "c01", month: "2023-06", expert_scores: [3, 4], consensus: 6 }],
        inter_rater: { kappa: null, agreement: null },
      }),
    );
    await expect(makeClient(fake).exportAssessments()).rejects.toBeInstanceOf(PayloadError);
  });
});

describe("error mapping", () => {
  it("surfaces the service's code and detail verbatim", async () => {
    const fake = new FakeFetch();
    fake.respondWith(
      jsonResponse(403, { error: { code: "authorization", detail: "token does not belong to this rater" } }),
    );
    const failure = await makeClient(fake).nextTask("alice").catch((e: unknown) => e);

    expect(failure).toBeInstanceOf(ApiError);
    const apiError = failure as ApiError;
    expect(apiError.status).toBe(403);
    expect(apiError.code).toBe("authorization");
    expect(apiError.detail).toBe("token does not belong to this rater");
  });

  it("keeps extra error fields such as the missing list", async () => {
    const fake = new FakeFetch();
    fake.respondWith(
      jsonResponse(409, {
        error: {
          code: "incomplete",
          detail: "1 assignment outstanding",
          missing: [{ rater_id: "bob", company_id: "c02", month: "2023-06" }],
        },
      }),
    );
    const failure = (await makeClient(fake).exportAssessments().catch((e: unknown) => e)) as ApiError;
    expect(failure.code).toBe("incomplete");
    expect(failure.extra.missing).toEqual([{ rater_id: "bob", company_id: "c02", month: "2023-06" }]);
  });

  it("falls back to a status-only error for non-JSON bodies", async () => {
    const fake = new FakeFetch();
    fake.respondWith({
      ok: false,
      status: 404,
      statusText: "Not Found",
      json: async () => {
        throw new SyntaxError("not json");
      },
    });
    const failure = (await makeClient(fake).nextTask("alice").catch((e: unknown) => e)) as ApiError;
    expect(failure.status).toBe(404);
    expect(failure.code).toBe("http_404");
  });
});

describe("retry behavior", () => {
  it("does not retry a 4xx response", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(422, { error: { code: "validation", detail: "score must be in 1..5" } }));
    const client = makeClient(fake, { maxRetries: 3 });
    await expect(client.submitRating(SUBMISSION)).rejects.toBeInstanceOf(ApiError);
    expect(fake.calls).toHaveLength(1);
  });

  it("retries a 5xx response and then succeeds", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(500, { error: { code: "internal", detail: "boom" } }));
    fake.respondWith(jsonResponse(200, RAW_TASK));
    const payload = await makeClient(fake, { maxRetries: 1 }).nextTask("alice");
    expect(fake.calls).toHaveLength(2);
    expect(payload.done).toBe(false);
  });

  it("retries a network failure and resends the identical submission body", async () => {
    const fake = new FakeFetch();
    fake.rejectWith(new TypeError("fetch failed"));
    fake.respondWith(jsonResponse(200, RAW_ACK));
    const ack = await makeClient(fake, { maxRetries: 1 }).submitRating(SUBMISSION);

    expect(ack.ok).toBe(true);
    expect(fake.calls).toHaveLength(2);
    expect(fake.calls[0].init?.body).toBe(fake.calls[1].init?.body);
    const resent = JSON.parse(String(fake.calls[1].init?.body)) as { idempotency_token: string };
    expect(resent.idempotency_token).toBe("tok-1");
  });

  it("raises NetworkError once transport retries are exhausted", async () => {
    const fake = new FakeFetch();
    fake.rejectWith(new TypeError("fetch failed"));
    fake.rejectWith(new TypeError("fetch failed"));
    await expect(makeClient(fake, { maxRetries: 1 }).nextTask("alice")).rejects.toBeInstanceOf(NetworkError);
    expect(fake.calls).toHaveLength(2);
  });

  it("raises the last ApiError when 5xx retries are exhausted", async () => {
    const fake = new FakeFetch();
    fake.respondWith(jsonResponse(500, { error: { code: "internal", detail: "boom" } }));
    fake.respondWith(jsonResponse(503, { error: { code: "internal", detail: "still down" } }));
    const failure = (await makeClient(fake, { maxRetries: 1 }).nextTask("alice").catch((e: unknown) => e)) as ApiError;
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(503);
    expect(failure.detail).toBe("still down");
  });
});
