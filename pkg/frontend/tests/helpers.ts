import { RatingSubmission, ResponseLike } from "../src/api.js";
import { TaskGateway } from "../src/session.js";
import { DossierRow, Rubric, SubmitAck, TaskPayload, TaskView } from "../src/types.js";

export const RUBRIC: Rubric = {
  preamble: "Assign exactly one score from 1 to 5 for the month.",
  criteria: {
    "1": "Severe deterioration across the business.",
    "2": "Unfavorable conditions with limited upside.",
    "3": "No significant change in the company's situation.",
    "4": "Clear improvement in revenue and outlook.",
    "5": "Exceptional growth and a dominant market position.",
  },
};

export function makeTask(companyId: string, rowCount = 1): TaskView {
  const rows: DossierRow[] = [];
  for (let i = 0; i < rowCount; i++) {
    rows.push({
      date: `2023-06-${String(5 + i).padStart(2, "0")}`,
      time: "10:00",
      details: `Filing: synthetic event ${i} for ${companyId}.`,
    });
  }
  return { company_id: companyId, month: "2023-06", rows };
}

export function taskPayload(companyId: string, completed: number, total: number, rowCount = 1): TaskPayload {
  return {
    done: false,
    task: makeTask(companyId, rowCount),
    rubric: RUBRIC,
    progress: { completed, total },
  };
}

export function donePayload(completed: number, total: number): TaskPayload {
  return { done: true, progress: { completed, total } };
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (reason: unknown) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (reason: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

/** Scripted in-memory stand-in for the HTTP client. */
export class FakeGateway implements TaskGateway {
  readonly submissions: RatingSubmission[] = [];
  readonly queue: TaskPayload[];
  failNextFetch: Error | null = null;
  failNextSubmit: Error | null = null;
  /** When set, the next nextTask() call returns this promise instead of the queue. */
  deferredFetch: Promise<TaskPayload> | null = null;
  /** When set, the next submitRating() call returns this promise after recording. */
  deferredSubmit: Promise<SubmitAck> | null = null;
  lastRaterSeen: string | null = null;

  constructor(queue: TaskPayload[] = []) {
    this.queue = queue;
  }

  async nextTask(raterId: string): Promise<TaskPayload> {
    this.lastRaterSeen = raterId;
    if (this.failNextFetch) {
      const failure = this.failNextFetch;
      this.failNextFetch = null;
      throw failure;
    }
    if (this.deferredFetch) {
      const pending = this.deferredFetch;
      this.deferredFetch = null;
      return pending;
    }
    const next = this.queue.shift();
    if (!next) {
      throw new Error("fake gateway task queue is empty");
    }
    return next;
  }

  async submitRating(submission: RatingSubmission): Promise<SubmitAck> {
    this.submissions.push({ ...submission });
    if (this.failNextSubmit) {
      const failure = this.failNextSubmit;
      this.failNextSubmit = null;
      throw failure;
    }
    if (this.deferredSubmit) {
      const pending = this.deferredSubmit;
      this.deferredSubmit = null;
      return pending;
    }
    return {
      ok: true,
      progress: { completed: this.submissions.length, total: 10 },
      resubmission: false,
      duplicate: false,
    };
  }
}

export function ack(completed: number, total: number): SubmitAck {
  return { ok: true, progress: { completed, total }, resubmission: false, duplicate: false };
}

/** Yield to the microtask queue a few times so chained awaits settle. */
export async function flush(rounds = 4): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function jsonResponse(status: number, body: unknown): ResponseLike {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => body,
  };
}

type Responder = (url: string, init?: RequestInit) => Promise<ResponseLike>;

/** Records every request and answers from a queue of scripted responders. */
export class FakeFetch {
  readonly calls: { url: string; init?: RequestInit }[] = [];
  private readonly responders: Responder[] = [];

  respondWith(response: ResponseLike): void {
    this.responders.push(async () => response);
  }

  rejectWith(failure: Error): void {
    this.responders.push(async () => {
      throw failure;
    });
  }

  readonly fetch = async (url: string, init?: RequestInit): Promise<ResponseLike> => {
    this.calls.push({ url, init });
    const responder = this.responders.shift();
    if (!responder) {
      throw new Error(`no responder queued for ${url}`);
    }
    return responder(url, init);
  };
}
