/**
 * Rater flow state machine.
 *
 * States are exactly {loading, task-shown, submitting, done, error}. A
 * submission always passes through "submitting" before the next "loading";
 * the score sent is the score selected, untransformed. One request is in
 * flight at a time: every async operation bumps a generation counter and a
 * stale response is dropped.
 */

import { ApiError, NetworkError, RatingSubmission } from "./api.js";
import { PayloadError, Progress, Rubric, Score, SubmitAck, TaskPayload, TaskView } from "./types.js";

export interface TaskGateway {
  nextTask(raterId: string): Promise<TaskPayload>;
  submitRating(submission: RatingSubmission): Promise<SubmitAck>;
}

export type SessionState =
  | { kind: "loading" }
  | { kind: "task-shown"; task: TaskView; rubric: Rubric; progress: Progress; selected: Score | null }
  | { kind: "submitting"; task: TaskView; rubric: Rubric; progress: Progress; selected: Score }
  | { kind: "done"; progress: Progress }
  | { kind: "error"; message: string };

interface TaskContext {
  task: TaskView;
  rubric: Rubric;
  progress: Progress;
  selected: Score;
}

export type Listener = (state: SessionState) => void;

function describeFailure(failure: unknown): string {
  if (failure instanceof ApiError) {
    return failure.detail;
  }
  if (failure instanceof PayloadError) {
    return `invalid payload from the service: ${failure.message}`;
  }
  if (failure instanceof NetworkError) {
    return "the annotation service could not be reached";
  }
  return failure instanceof Error ? failure.message : String(failure);
}

function defaultToken(): string {
  const crypto = globalThis.crypto;
  if (crypto?.randomUUID) {
    return crypto.randomUUID();
  }
  return `tok-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export class RaterSession {
  readonly raterId: string;

  private readonly gateway: TaskGateway;
  private readonly newToken: () => string;
  private readonly listeners = new Set<Listener>();
  private current: SessionState = { kind: "loading" };
  private generation = 0;
  private recovery: (() => Promise<void>) | null = null;
  /** Idempotency token for the current task; reused verbatim on retries. */
  private token: string | null = null;

  constructor(gateway: TaskGateway, raterId: string, options: { newToken?: () => string } = {}) {
    this.gateway = gateway;
    this.raterId = raterId;
    this.newToken = options.newToken ?? defaultToken;
  }

  get state(): SessionState {
    return this.current;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => {
      this.listeners.delete(listener);
    };
  }

  /** Fetch the first (or next, after an error) task. */
  async start(): Promise<void> {
    const generation = ++this.generation;
    this.recovery = null;
    this.setState({ kind: "loading" });
    await this.fetchNext(generation);
  }

  /** Record the rater's choice. Allowed only while a task is shown. */
  select(score: Score): boolean {
    if (this.current.kind !== "task-shown") {
      return false;
    }
    this.setState({ ...this.current, selected: score });
    return true;
  }

  /**
   * Send the selected score. Blocked without a selection and while another
   * submission is in flight.
   */
  async submit(): Promise<boolean> {
    const state = this.current;
    if (state.kind !== "task-shown" || state.selected === null) {
      return false;
    }
    const generation = ++this.generation;
    await this.performSubmit(generation, {
      task: state.task,
      rubric: state.rubric,
      progress: state.progress,
      selected: state.selected,
    });
    return true;
  }

  /** Re-run the operation that landed the session in the error state. */
  async retry(): Promise<boolean> {
    if (this.current.kind !== "error" || this.recovery === null) {
      return false;
    }
    const recovery = this.recovery;
    this.recovery = null;
    await recovery();
    return true;
  }

  private async fetchNext(generation: number): Promise<void> {
    try {
      const payload = await this.gateway.nextTask(this.raterId);
      if (generation !== this.generation) {
        return;
      }
      if (payload.done) {
        this.setState({ kind: "done", progress: payload.progress });
        return;
      }
      this.token = null;
      this.setState({
        kind: "task-shown",
        task: payload.task,
        rubric: payload.rubric,
        progress: payload.progress,
        selected: null,
      });
    } catch (failure) {
      if (generation !== this.generation) {
        return;
      }
      this.recovery = () => this.start();
      this.setState({ kind: "error", message: describeFailure(failure) });
    }
  }

  private async performSubmit(generation: number, context: TaskContext): Promise<void> {
    this.token ??= this.newToken();
    this.setState({ kind: "submitting", ...context });
    try {
      await this.gateway.submitRating({
        rater_id: this.raterId,
        company_id: context.task.company_id,
        month: context.task.month,
        score: context.selected,
        idempotency_token: this.token,
      });
      if (generation !== this.generation) {
        return;
      }
      this.token = null;
      this.recovery = null;
      this.setState({ kind: "loading" });
      await this.fetchNext(generation);
    } catch (failure) {
      if (generation !== this.generation) {
        return;
      }
      // The selection and the idempotency token ride along in this closure,
      // so a retry resubmits exactly what the rater chose.
      this.recovery = async () => {
        await this.performSubmit(++this.generation, context);
      };
      this.setState({ kind: "error", message: describeFailure(failure) });
    }
  }

  private setState(state: SessionState): void {
    this.current = state;
    for (const listener of this.listeners) {
      listener(state);
    }
  }
}
