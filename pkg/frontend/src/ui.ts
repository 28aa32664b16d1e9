/**
 * DOM view for the rater flow: a login screen (service URL, rater id,
 * bearer token), then one dossier at a time with the rubric, five labeled
 * score buttons, a progress count, and a completion screen. Keys 1-5
 * select a score; Submit stays disabled until a score is chosen.
 */

import { AnnotationClient, FetchLike } from "./api.js";
import { RaterSession, SessionState } from "./session.js";
import { Progress, Rubric, SCORES, SCORE_LABELS, Score, TaskView } from "./types.js";

type Child = Node | string;

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export interface SessionConfig {
  baseUrl: string;
  raterId: string;
  token: string;
}

export type SessionFactory = (config: SessionConfig) => RaterSession;

export interface AppOptions {
  /** Prefills the service URL field; defaults to the page origin. */
  defaultBaseUrl?: string;
  /** Injectable transport, forwarded to the HTTP client. */
  fetchImpl?: FetchLike;
  /** Test seam: build the session from the submitted login form. */
  createSession?: SessionFactory;
}

/** Render the login screen; a successful login swaps in the rater flow. */
export function mountApp(root: HTMLElement, options: AppOptions = {}): void {
  const doc = root.ownerDocument;
  const createSession: SessionFactory =
    options.createSession ??
    (({ baseUrl, raterId, token }) =>
      new RaterSession(new AnnotationClient({ baseUrl, token, fetchImpl: options.fetchImpl }), raterId));

  const urlInput = el(doc, "input", {
    id: "service-url",
    type: "text",
    value: options.defaultBaseUrl ?? "",
  });
  const raterInput = el(doc, "input", { id: "rater-id", type: "text", autocomplete: "username" });
  const tokenInput = el(doc, "input", { id: "rater-token", type: "password" });
  const message = el(doc, "p", { id: "login-error", class: "error-text", hidden: "" });
  const startButton = el(doc, "button", { id: "login", type: "submit" }, ["Start rating"]);

  const field = (label: string, input: HTMLInputElement): HTMLElement =>
    el(doc, "label", { class: "field" }, [label, input]);

  const form = el(doc, "form", { id: "login-form" }, [
    el(doc, "h1", {}, ["Disclosure rating"]),
    field("Service URL", urlInput),
    field("Rater id", raterInput),
    field("Access token", tokenInput),
    startButton,
    message,
  ]);

  let started = false;
  const handleStart = (event: Event): void => {
    event.preventDefault();
    if (started) {
      return;
    }
    const baseUrl = urlInput.value.trim();
    const raterId = raterInput.value.trim();
    const token = tokenInput.value.trim();
    if (!baseUrl || !raterId || !token) {
      message.textContent = "Service URL, rater id, and access token are all required.";
      message.removeAttribute("hidden");
      return;
    }
    started = true;
    const session = createSession({ baseUrl, raterId, token });
    mountSession(root, session);
    void session.start();
  };
  form.addEventListener("submit", handleStart);
  startButton.addEventListener("click", handleStart);

  root.replaceChildren(form);
}

/**
 * Bind a session to the DOM: re-render on every state change, route score
 * buttons, Submit, Retry, and the 1-5 keyboard shortcuts into the session.
 * Returns a teardown function.
 */
export function mountSession(root: HTMLElement, session: RaterSession): () => void {
  const doc = root.ownerDocument;

  const render = (state: SessionState): void => {
    root.replaceChildren(buildScreen(doc, session, state));
  };
  const unsubscribe = session.subscribe(render);

  const onKeydown = (event: KeyboardEvent): void => {
    if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement) {
      return;
    }
    if (event.key >= "1" && event.key <= "5") {
      session.select(Number(event.key) as Score);
    }
  };
  doc.addEventListener("keydown", onKeydown);

  render(session.state);
  return () => {
    unsubscribe();
    doc.removeEventListener("keydown", onKeydown);
  };
}

function buildScreen(doc: Document, session: RaterSession, state: SessionState): HTMLElement {
  switch (state.kind) {
    case "loading":
      return el(doc, "section", { class: "status-screen" }, [
        el(doc, "p", { id: "status" }, ["Loading next task..."]),
      ]);
    case "task-shown":
      return buildTaskScreen(doc, session, state.task, state.rubric, state.progress, state.selected, false);
    case "submitting":
      return buildTaskScreen(doc, session, state.task, state.rubric, state.progress, state.selected, true);
    case "done":
      return buildDoneScreen(doc, state.progress);
    case "error":
      return buildErrorScreen(doc, session, state.message);
  }
}

function buildTaskScreen(
  doc: Document,
  session: RaterSession,
  task: TaskView,
  rubric: Rubric,
  progress: Progress,
  selected: Score | null,
  submitting: boolean,
): HTMLElement {
  const header = el(doc, "header", { class: "task-header" }, [
    el(doc, "h2", { id: "task-heading" }, [`${task.company_id} — ${task.month}`]),
    el(doc, "span", { id: "rater-chip" }, [`Rating as ${session.raterId}`]),
  ]);

  const bar = el(doc, "progress", {
    id: "progress-bar",
    max: String(progress.total),
    value: String(progress.completed),
  });
  const progressSection = el(doc, "section", { class: "progress" }, [
    el(doc, "span", { id: "progress-text" }, [`${progress.completed} of ${progress.total} completed`]),
    bar,
  ]);

  const tbody = el(doc, "tbody", {});
  for (const row of task.rows) {
    tbody.append(
      el(doc, "tr", { class: "dossier-row" }, [
        el(doc, "td", { class: "row-date" }, [row.date]),
        el(doc, "td", { class: "row-time" }, [row.time]),
        el(doc, "td", { class: "row-details" }, [row.details]),
      ]),
    );
  }
  const table = el(doc, "table", { class: "dossier" }, [
    el(doc, "thead", {}, [
      el(doc, "tr", {}, [
        el(doc, "th", {}, ["Date"]),
        el(doc, "th", {}, ["Time"]),
        el(doc, "th", {}, ["Details"]),
      ]),
    ]),
    tbody,
  ]);

  const criteria = el(doc, "ol", { class: "criteria" });
  for (const score of SCORES) {
    criteria.append(
      el(doc, "li", { class: "criterion" }, [
        el(doc, "strong", {}, [`${score} (${SCORE_LABELS[score]})`]),
        ` ${rubric.criteria[String(score)]}`,
      ]),
    );
  }
  const rubricSection = el(doc, "details", { class: "rubric", open: "" }, [
    el(doc, "summary", {}, ["Scoring rubric"]),
    el(doc, "p", { class: "rubric-preamble" }, [rubric.preamble]),
    criteria,
  ]);

  const buttons = el(doc, "div", { class: "score-buttons" });
  for (const score of SCORES) {
    const button = el(
      doc,
      "button",
      {
        class: "score-button",
        type: "button",
        "data-score": String(score),
        "aria-pressed": selected === score ? "true" : "false",
      },
      [`${score} (${SCORE_LABELS[score]})`],
    );
    if (submitting) {
      button.disabled = true;
    }
    button.addEventListener("click", () => {
      session.select(score);
    });
    buttons.append(button);
  }

  const submitButton = el(doc, "button", { id: "submit-rating", type: "button" }, [
    submitting ? "Submitting..." : "Submit rating",
  ]);
  submitButton.disabled = submitting || selected === null;
  submitButton.addEventListener("click", () => {
    void session.submit();
  });

  const scoring = el(doc, "section", { class: "scoring" }, [
    buttons,
    submitButton,
    el(doc, "p", { class: "hint" }, ["Keys 1-5 select a score."]),
  ]);

  return el(doc, "main", { class: "task-screen" }, [
    header,
    progressSection,
    el(doc, "section", { class: "task" }, [table]),
    rubricSection,
    scoring,
  ]);
}

function buildDoneScreen(doc: Document, progress: Progress): HTMLElement {
  return el(doc, "section", { class: "done-screen" }, [
    el(doc, "h2", {}, ["All tasks complete"]),
    el(doc, "p", { id: "final-count" }, [`${progress.completed} of ${progress.total} submitted.`]),
  ]);
}

function buildErrorScreen(doc: Document, session: RaterSession, message: string): HTMLElement {
  const retryButton = el(doc, "button", { id: "retry", type: "button" }, ["Retry"]);
  retryButton.addEventListener("click", () => {
    void session.retry();
  });
  return el(doc, "section", { class: "error-screen" }, [
    el(doc, "p", { id: "error-message" }, [message]),
    retryButton,
  ]);
}
