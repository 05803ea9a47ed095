// Typed client for the review service /api surface. The UI talks to the
// backend exclusively through this module.

export interface ReviewItem {
  item_id: string;
  question: string;
  generated_answer: string;
  reference_answer: string | null;
  show_reference: boolean;
}

export type CriterionName = "readability" | "relevancy" | "accuracy" | "completeness";

export const CRITERIA: CriterionName[] = [
  "readability",
  "relevancy",
  "accuracy",
  "completeness",
];

export type Scores = Record<CriterionName, number>;

export interface RatingPayload extends Scores {
  item_id: string;
  rater_id: string;
}

export interface ReviewReport {
  means: Record<CriterionName, number> | null;
  iaa: Record<CriterionName, number> | null;
  iaa_omitted: boolean;
  n_items: number;
  n_raters: number;
  completion: Record<string, number>;
  binarization_threshold: number;
}

export interface RubricCriterion {
  name: CriterionName;
  title: string;
  description: string;
  anchors: Record<string, string>;
}

export interface Rubric {
  scale: number[];
  criteria: RubricCriterion[];
}

export type SubmitResult =
  | { kind: "ok" }
  | { kind: "validation"; criterion: string | null; detail: string }
  | { kind: "not-found"; detail: string };

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ReviewApi {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async fetchItems(raterId: string): Promise<ReviewItem[]> {
    const response = await fetch(
      this.url(`/api/items?rater_id=${encodeURIComponent(raterId)}`),
    );
    if (!response.ok) {
      throw new ApiError(`fetching items failed (${response.status})`, response.status);
    }
    return (await response.json()) as ReviewItem[];
  }

  /** Submit one rating. Server-side rejections come back as a result, not a
   * throw; only transport failures throw. */
  async submitRating(payload: RatingPayload): Promise<SubmitResult> {
    const response = await fetch(this.url("/api/ratings"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (response.ok) {
      return { kind: "ok" };
    }
    const body = (await response.json()) as { criterion?: string | null; detail?: string };
    if (response.status === 404) {
      return { kind: "not-found", detail: body.detail ?? "unknown item" };
    }
    return {
      kind: "validation",
      criterion: body.criterion ?? null,
      detail: body.detail ?? "rejected",
    };
  }

  async fetchReport(): Promise<ReviewReport> {
    const response = await fetch(this.url("/api/report"));
    if (!response.ok) {
      throw new ApiError(`fetching report failed (${response.status})`, response.status);
    }
    return (await response.json()) as ReviewReport;
  }

  async fetchRubric(): Promise<Rubric> {
    const response = await fetch(this.url("/api/rubric"));
    if (!response.ok) {
      throw new ApiError(`fetching rubric failed (${response.status})`, response.status);
    }
    return (await response.json()) as Rubric;
  }
}
