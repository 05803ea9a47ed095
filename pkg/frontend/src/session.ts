// Rating session state: the pending queue for one rater plus submission
// handling (validation, retry buffer for network failures, duplicate-submit
// protection). No aggregate is ever computed here; the report view always
// re-fetches from the server.

import { CRITERIA, ReviewApi, ReviewItem, RatingPayload, Scores } from "./api.js";

export type AdvanceOutcome =
  | { kind: "advanced"; next: ReviewItem | null }
  | { kind: "invalid"; criterion: string | null; detail: string }
  | { kind: "not-found"; detail: string }
  | { kind: "buffered" } // network failure: rating kept locally, retry later
  | { kind: "busy" }; // a submission is already in flight

export class ReviewSession {
  private queue: ReviewItem[] = [];
  private assigned = 0;
  private inFlight = false;
  private retryBuffer: RatingPayload | null = null;
  completedCount = 0;

  constructor(
    private readonly api: ReviewApi,
    readonly raterId: string,
  ) {}

  async load(): Promise<void> {
    this.queue = await this.api.fetchItems(this.raterId);
    this.assigned = this.queue.length + this.completedCount;
  }

  get current(): ReviewItem | null {
    return this.queue[0] ?? null;
  }

  get pendingCount(): number {
    return this.queue.length;
  }

  get assignedCount(): number {
    return this.assigned;
  }

  get hasBufferedRating(): boolean {
    return this.retryBuffer !== null;
  }

  /** Validate locally; null means complete. Returns the first offending
   * criterion otherwise. */
  static missingCriterion(scores: Partial<Scores>): string | null {
    for (const criterion of CRITERIA) {
      const value = scores[criterion];
      if (
        value === undefined ||
        !Number.isInteger(value) ||
        value < 1 ||
        value > 5
      ) {
        return criterion;
      }
    }
    return null;
  }

  async rateAndAdvance(scores: Partial<Scores>): Promise<AdvanceOutcome> {
    const item = this.current;
    if (item === null) {
      return { kind: "invalid", criterion: null, detail: "no item is displayed" };
    }
    const missing = ReviewSession.missingCriterion(scores);
    if (missing !== null) {
      // Incomplete form: block before any network call.
      return { kind: "invalid", criterion: missing, detail: `${missing} is not set` };
    }
    if (this.inFlight) {
      return { kind: "busy" };
    }
    const payload: RatingPayload = {
      item_id: item.item_id,
      rater_id: this.raterId,
      ...(scores as Scores),
    };
    return this.send(payload);
  }

  /** Retry a rating buffered after a network failure. */
  async retryBuffered(): Promise<AdvanceOutcome> {
    if (this.retryBuffer === null) {
      return { kind: "invalid", criterion: null, detail: "nothing to retry" };
    }
    if (this.inFlight) {
      return { kind: "busy" };
    }
    return this.send(this.retryBuffer);
  }

  private async send(payload: RatingPayload): Promise<AdvanceOutcome> {
    this.inFlight = true;
    try {
      const result = await this.api.submitRating(payload);
      if (result.kind === "ok") {
        this.retryBuffer = null;
        if (this.queue[0]?.item_id === payload.item_id) {
          this.queue.shift();
        }
        this.completedCount += 1;
        return { kind: "advanced", next: this.current };
      }
      if (result.kind === "not-found") {
        this.retryBuffer = null;
        return { kind: "not-found", detail: result.detail };
      }
      // Server-side validation: keep the queue position unchanged.
      this.retryBuffer = null;
      return { kind: "invalid", criterion: result.criterion, detail: result.detail };
    } catch {
      this.retryBuffer = payload;
      return { kind: "buffered" };
    } finally {
      this.inFlight = false;
    }
  }
}
