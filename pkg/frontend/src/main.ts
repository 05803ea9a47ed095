// Single-page wiring: rater sign-in, rate-and-advance loop, report view.

import { ReviewApi, Rubric } from "./api.js";
import { ReviewSession } from "./session.js";
import {
  clearHighlights,
  highlightCriterion,
  readScores,
  renderCompletionView,
  renderItemView,
  renderReportView,
  setNotice,
} from "./view.js";

const api = new ReviewApi("");

function root(): HTMLElement {
  const node = document.getElementById("app");
  if (node === null) throw new Error("missing #app container");
  return node;
}

function renderSignIn(): void {
  const container = root();
  container.innerHTML = "";
  const doc = container.ownerDocument;
  const panel = doc.createElement("div");
  panel.className = "sign-in";
  const heading = doc.createElement("h2");
  heading.textContent = "Reviewer sign-in";
  const input = doc.createElement("input");
  input.placeholder = "rater id";
  input.id = "rater-id";
  const button = doc.createElement("button");
  button.textContent = "Start";
  button.addEventListener("click", () => {
    if (input.value.trim()) void startSession(input.value.trim());
  });
  panel.append(heading, input, button);
  container.appendChild(panel);
}

async function startSession(raterId: string): Promise<void> {
  const session = new ReviewSession(api, raterId);
  const rubric = await api.fetchRubric();
  await session.load();
  renderCurrent(session, rubric);
}

function renderCurrent(session: ReviewSession, rubric: Rubric): void {
  const container = root();
  const item = session.current;
  if (item === null) {
    renderCompletionView(container, session.completedCount);
    wireReportLink();
    return;
  }
  renderItemView(container, item, rubric, {
    done: session.completedCount,
    total: session.assignedCount,
  });
  const form = container.querySelector("form.rating-form");
  form?.addEventListener("submit", () => void submit(session, rubric));
}

async function submit(session: ReviewSession, rubric: Rubric): Promise<void> {
  const container = root();
  clearHighlights(container);
  const outcome = await session.rateAndAdvance(readScores(container));
  switch (outcome.kind) {
    case "advanced":
      renderCurrent(session, rubric);
      break;
    case "invalid":
      highlightCriterion(container, outcome.criterion);
      setNotice(container, outcome.detail);
      break;
    case "buffered":
      setNotice(container, "Network problem: rating saved locally, retrying...");
      setTimeout(() => void retry(session, rubric), 1500);
      break;
    case "not-found":
      setNotice(container, outcome.detail);
      break;
    case "busy":
      break;
  }
}

async function retry(session: ReviewSession, rubric: Rubric): Promise<void> {
  const outcome = await session.retryBuffered();
  if (outcome.kind === "advanced") {
    renderCurrent(session, rubric);
  } else if (outcome.kind === "buffered") {
    setTimeout(() => void retry(session, rubric), 1500);
  }
}

function wireReportLink(): void {
  const link = root().querySelector("a.report-link");
  link?.addEventListener("click", () => void showReport());
}

async function showReport(): Promise<void> {
  renderReportView(root(), await api.fetchReport());
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  if (window.location.hash === "#report") {
    void showReport();
  } else {
    renderSignIn();
  }
}
