// DOM rendering. Pure functions over a container element so the same code
// runs in the browser and under happy-dom in tests. Aggregates shown in the
// report view come verbatim from the server report; anchor texts come
// verbatim from the rubric endpoint.

import { CRITERIA, CriterionName, ReviewItem, ReviewReport, Rubric } from "./api.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderItemView(
  container: HTMLElement,
  item: ReviewItem,
  rubric: Rubric,
  position: { done: number; total: number },
): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";

  const header = el(doc, "div", "item-header");
  header.appendChild(
    el(doc, "span", "progress", `Item ${position.done + 1} of ${position.total}`),
  );
  container.appendChild(header);

  const qa = el(doc, "div", "qa");
  qa.appendChild(el(doc, "h2", "question-label", "Question"));
  qa.appendChild(el(doc, "p", "question", item.question));
  qa.appendChild(el(doc, "h2", "answer-label", "Generated answer"));
  qa.appendChild(el(doc, "p", "generated-answer", item.generated_answer));
  if (item.show_reference && item.reference_answer !== null) {
    qa.appendChild(el(doc, "h2", "reference-label", "Reference answer"));
    qa.appendChild(el(doc, "p", "reference-answer", item.reference_answer));
  }
  container.appendChild(qa);

  const form = el(doc, "form", "rating-form");
  form.addEventListener("submit", (event) => event.preventDefault());
  for (const criterion of rubric.criteria) {
    const fieldset = el(doc, "fieldset", "criterion");
    fieldset.dataset.criterion = criterion.name;
    fieldset.appendChild(el(doc, "legend", "criterion-title", criterion.title));
    fieldset.appendChild(el(doc, "p", "criterion-description", criterion.description));
    for (const value of rubric.scale) {
      const label = el(doc, "label", "anchor");
      const radio = el(doc, "input");
      radio.type = "radio";
      radio.name = criterion.name;
      radio.value = String(value);
      label.appendChild(radio);
      // Anchor text rendered byte-identical to the rubric payload.
      label.appendChild(
        el(doc, "span", "anchor-text", criterion.anchors[String(value)] ?? String(value)),
      );
      fieldset.appendChild(label);
    }
    form.appendChild(fieldset);
  }
  const submit = el(doc, "button", "submit-rating", "Submit rating");
  submit.setAttribute("type", "submit");
  form.appendChild(submit);
  const notice = el(doc, "p", "form-notice");
  notice.setAttribute("role", "alert");
  form.appendChild(notice);
  container.appendChild(form);
}

export function readScores(container: HTMLElement): Partial<Record<CriterionName, number>> {
  const scores: Partial<Record<CriterionName, number>> = {};
  for (const criterion of CRITERIA) {
    const checked = container.querySelector<HTMLInputElement>(
      `input[name="${criterion}"]:checked`,
    );
    if (checked !== null) {
      scores[criterion] = Number(checked.value);
    }
  }
  return scores;
}

export function clearHighlights(container: HTMLElement): void {
  for (const fieldset of Array.from(container.querySelectorAll("fieldset.criterion"))) {
    fieldset.classList.remove("invalid");
  }
  setNotice(container, "");
}

export function highlightCriterion(container: HTMLElement, criterion: string | null): void {
  if (criterion === null) return;
  const fieldset = container.querySelector(
    `fieldset.criterion[data-criterion="${criterion}"]`,
  );
  fieldset?.classList.add("invalid");
}

export function setNotice(container: HTMLElement, message: string): void {
  const notice = container.querySelector(".form-notice");
  if (notice !== null) notice.textContent = message;
}

export function renderCompletionView(container: HTMLElement, completed: number): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";
  const panel = el(doc, "div", "completion");
  panel.appendChild(el(doc, "h2", undefined, "All items rated"));
  panel.appendChild(
    el(doc, "p", "completed-count", `You rated ${completed} item(s). Thank you.`),
  );
  const link = el(doc, "a", "report-link", "View the aggregate report");
  link.setAttribute("href", "#report");
  panel.appendChild(link);
  container.appendChild(panel);
}

export function renderReportView(container: HTMLElement, report: ReviewReport): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";
  const panel = el(doc, "div", "report");
  panel.appendChild(el(doc, "h2", undefined, "Review report"));

  if (report.means === null) {
    panel.appendChild(el(doc, "p", "empty-report", "No ratings submitted yet."));
    container.appendChild(panel);
    return;
  }

  const bars = el(doc, "div", "mean-bars");
  for (const criterion of CRITERIA) {
    const mean = report.means[criterion];
    const row = el(doc, "div", "mean-row");
    row.dataset.criterion = criterion;
    row.appendChild(el(doc, "span", "mean-label", criterion));
    const track = el(doc, "div", "bar-track");
    const bar = el(doc, "div", "bar-fill");
    bar.style.width = `${(mean / 5) * 100}%`;
    bar.dataset.mean = String(mean);
    track.appendChild(bar);
    row.appendChild(track);
    row.appendChild(el(doc, "span", "mean-value", mean.toFixed(2)));
    bars.appendChild(row);
  }
  panel.appendChild(bars);

  if (report.iaa !== null) {
    const iaa = el(doc, "div", "iaa");
    iaa.appendChild(el(doc, "h3", undefined, "Inter-rater agreement"));
    for (const criterion of CRITERIA) {
      const value = report.iaa[criterion];
      const row = el(doc, "div", "iaa-row");
      row.dataset.criterion = criterion;
      row.dataset.iaa = String(value);
      row.appendChild(el(doc, "span", "iaa-label", criterion));
      row.appendChild(el(doc, "span", "iaa-value", value.toFixed(2)));
      iaa.appendChild(row);
    }
    panel.appendChild(iaa);
  } else {
    panel.appendChild(
      el(doc, "p", "iaa-notice", "Agreement omitted: insufficient co-rated items."),
    );
  }

  panel.appendChild(
    el(
      doc,
      "p",
      "report-counts",
      `${report.n_items} item(s), ${report.n_raters} rater(s).`,
    ),
  );
  container.appendChild(panel);
}
