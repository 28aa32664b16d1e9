/**
 * Payload shapes for the annotation service HTTP API, plus runtime
 * validators. The view layer renders these objects exactly as received;
 * nothing in the client mutates dossier content.
 */

export type Score = 1 | 2 | 3 | 4 | 5;

export const SCORES: readonly Score[] = [1, 2, 3, 4, 5];

/** Display labels for the five-point scale, shared with the rating rubric. */
export const SCORE_LABELS: Readonly<Record<Score, string>> = {
  1: "Very Negative",
  2: "Negative",
  3: "Neutral",
  4: "Positive",
  5: "Very Positive",
};

export interface DossierRow {
  /** Disclosure date, YYYY-MM-DD. */
  date: string;
  /** Disclosure time, HH:MM. */
  time: string;
  /** Title and one-sentence summary, pre-joined by the service. */
  details: string;
}

export interface TaskView {
  company_id: string;
  month: string;
  rows: DossierRow[];
}

export interface Rubric {
  preamble: string;
  /** Criterion text keyed by score, "1" through "5". */
  criteria: Record<string, string>;
}

export interface Progress {
  completed: number;
  total: number;
}

export type TaskPayload =
  | { done: true; progress: Progress }
  | { done: false; task: TaskView; rubric: Rubric; progress: Progress };

export interface SubmitAck {
  ok: boolean;
  progress: Progress;
  resubmission: boolean;
  duplicate: boolean;
}

export interface AssessmentRecord {
  company_id: string;
  month: string;
  expert_scores: number[];
  consensus: number;
}

export interface ExportPayload {
  assessments: AssessmentRecord[];
  inter_rater: { kappa: number | null; agreement: number | null };
}

/** A response body that does not match the service contract. */
export class PayloadError extends Error {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function asString(value: unknown, context: string): string {
  if (typeof value !== "string") {
    throw new PayloadError(`${context}: expected a string`);
  }
  return value;
}

function asNumber(value: unknown, context: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new PayloadError(`${context}: expected a number`);
  }
  return value;
}

function asBoolean(value: unknown, context: string): boolean {
  if (typeof value !== "boolean") {
    throw new PayloadError(`${context}: expected a boolean`);
  }
  return value;
}

export function asScore(value: unknown, context = "score"): Score {
  if (typeof value !== "number" || !Number.isInteger(value) || value < 1 || value > 5) {
    throw new PayloadError(`${context}: expected an integer in 1..5`);
  }
  return value as Score;
}

export function parseProgress(data: unknown, context = "progress"): Progress {
  if (!isRecord(data)) {
    throw new PayloadError(`${context}: expected an object`);
  }
  return {
    completed: asNumber(data.completed, `${context}.completed`),
    total: asNumber(data.total, `${context}.total`),
  };
}

function parseRow(data: unknown, context: string): DossierRow {
  if (!isRecord(data)) {
    throw new PayloadError(`${context}: expected an object`);
  }
  return {
    date: asString(data.date, `${context}.date`),
    time: asString(data.time, `${context}.time`),
    details: asString(data.details, `${context}.details`),
  };
}

function parseTask(data: unknown): TaskView {
  if (!isRecord(data)) {
    throw new PayloadError("task: expected an object");
  }
  if (!Array.isArray(data.rows)) {
    throw new PayloadError("task.rows: expected an array");
  }
  if (data.rows.length === 0) {
    // Dossiers are nonempty by construction; an empty one is a broken feed.
    throw new PayloadError("task.rows: a dossier must contain at least one row");
  }
  return {
    company_id: asString(data.company_id, "task.company_id"),
    month: asString(data.month, "task.month"),
    rows: data.rows.map((row, i) => parseRow(row, `task.rows[${i}]`)),
  };
}

function parseRubric(data: unknown): Rubric {
  if (!isRecord(data)) {
    throw new PayloadError("rubric: expected an object");
  }
  if (!isRecord(data.criteria)) {
    throw new PayloadError("rubric.criteria: expected an object");
  }
  const criteria: Record<string, string> = {};
  for (const key of ["1", "2", "3", "4", "5"]) {
    criteria[key] = asString(data.criteria[key], `rubric.criteria[${key}]`);
  }
  return { preamble: asString(data.preamble, "rubric.preamble"), criteria };
}

export function parseTaskPayload(data: unknown): TaskPayload {
  if (!isRecord(data)) {
    throw new PayloadError("task payload: expected an object");
  }
  const done = asBoolean(data.done, "done");
  const progress = parseProgress(data.progress);
  if (done) {
    return { done: true, progress };
  }
  return { done: false, task: parseTask(data.task), rubric: parseRubric(data.rubric), progress };
}

export function parseSubmitAck(data: unknown): SubmitAck {
  if (!isRecord(data)) {
    throw new PayloadError("submit ack: expected an object");
  }
  return {
    ok: asBoolean(data.ok, "ok"),
    progress: parseProgress(data.progress),
    resubmission: asBoolean(data.resubmission, "resubmission"),
    duplicate: asBoolean(data.duplicate, "duplicate"),
  };
}

function parseAssessment(data: unknown, context: string): AssessmentRecord {
  if (!isRecord(data)) {
    throw new PayloadError(`${context}: expected an object`);
  }
  if (!Array.isArray(data.expert_scores)) {
    throw new PayloadError(`${context}.expert_scores: expected an array`);
  }
  return {
    company_id: asString(data.company_id, `${context}.company_id`),
    month: asString(data.month, `${context}.month`),
    expert_scores: data.expert_scores.map((s, i) => asScore(s, `${context}.expert_scores[${i}]`)),
    consensus: asScore(data.consensus, `${context}.consensus`),
  };
}

export function parseExportPayload(data: unknown): ExportPayload {
  if (!isRecord(data)) {
    throw new PayloadError("export payload: expected an object");
  }
  if (!Array.isArray(data.assessments)) {
    throw new PayloadError("assessments: expected an array");
  }
  if (!isRecord(data.inter_rater)) {
    throw new PayloadError("inter_rater: expected an object");
  }
  const nullableNumber = (value: unknown, context: string): number | null =>
    value === null ? null : asNumber(value, context);
  return {
    assessments: data.assessments.map((a, i) => parseAssessment(a, `assessments[${i}]`)),
    inter_rater: {
      kappa: nullableNumber(data.inter_rater.kappa, "inter_rater.kappa"),
      agreement: nullableNumber(data.inter_rater.agreement, "inter_rater.agreement"),
    },
  };
}
