/** Rating flow state machine: one sample at a time, submit only when all four
 * judgments are set, advance only after the service acknowledges, and never
 * drop a rating silently (a failed submit stays visible as unsent). */

import { ApiError } from "./api.js";
import {
  emptyRating,
  SEMANTIC_STEP,
  type RatingInput,
  type RatingPayload,
  type Sample,
  type SamplesPage,
  type SessionInfo,
} from "./types.js";

/** What the flow needs from the service; ReviewApi satisfies it. */
export interface ReviewService {
  openSession(evaluatorId: string): Promise<SessionInfo>;
  nextSamples(sessionId: string, count: number): Promise<SamplesPage>;
  submitRating(payload: RatingPayload): Promise<void>;
}

export type Phase =
  | "idle"
  | "loading"
  | "rating"
  | "submitting"
  | "retry" // network failure, unsent rating retained
  | "done"
  | "failed"; // session could not start

export interface PersonalSummary {
  rated: number;
  equationPreservedPct: number;
  numbersPreservedPct: number;
  meanSemanticSimilarity: number;
  meanGrammaticality: number;
}

export interface FlowSnapshot {
  phase: Phase;
  sample: Sample | null;
  input: RatingInput;
  rated: number;
  total: number;
  error: string | null; // inline validation / rejection text
  banner: string | null; // retry banner text, network failures only
}

export class RatingFlow {
  private phase: Phase = "idle";
  private sample: Sample | null = null;
  private input: RatingInput = emptyRating();
  private rated = 0;
  private total = 0;
  private error: string | null = null;
  private banner: string | null = null;
  private sessionId = "";
  private unsent: RatingPayload | null = null;
  private submitted: RatingPayload[] = [];

  constructor(
    private readonly api: ReviewService,
    private readonly evaluatorId: string,
  ) {}

  snapshot(): FlowSnapshot {
    return {
      phase: this.phase,
      sample: this.sample,
      input: { ...this.input },
      rated: this.rated,
      total: this.total,
      error: this.error,
      banner: this.banner,
    };
  }

  async start(): Promise<void> {
    this.phase = "loading";
    try {
      const session = await this.api.openSession(this.evaluatorId);
      this.sessionId = session.session_id;
      this.rated = session.rated;
      this.total = session.total;
      await this.advance();
    } catch (err) {
      this.phase = "failed";
      this.error = err instanceof Error ? err.message : String(err);
    }
  }

  /** Fetch the next unrated sample; flips to "done" when none remain. */
  private async advance(): Promise<void> {
    this.phase = "loading";
    const page = await this.api.nextSamples(this.sessionId, 1);
    this.rated = page.rated;
    this.total = page.total;
    const next = page.samples[0];
    if (!next) {
      this.sample = null;
      this.phase = "done";
      return;
    }
    this.sample = next;
    this.input = emptyRating();
    this.error = null;
    this.banner = null;
    this.phase = "rating";
  }

  setEquationPreserved(value: boolean): void {
    this.input.equation_preserved = value;
    this.error = null;
  }

  setNumbersPreserved(value: boolean): void {
    this.input.numbers_preserved = value;
    this.error = null;
  }

  /** Clamped to [0, 1] and snapped to the 0.05 grid. */
  setSemanticSimilarity(value: number): void {
    if (!Number.isFinite(value)) return;
    const clamped = Math.min(1, Math.max(0, value));
    this.input.semantic_similarity =
      Math.round(clamped / SEMANTIC_STEP) * SEMANTIC_STEP;
    // snap exactly onto two decimals so 0.1 + 0.2 style drift never appears
    this.input.semantic_similarity =
      Math.round(this.input.semantic_similarity * 100) / 100;
    this.error = null;
  }

  setGrammaticality(value: number): void {
    if (!Number.isInteger(value) || value < 1 || value > 5) return;
    this.input.grammaticality = value;
    this.error = null;
  }

  /** All four judgments must be set before submit enables. */
  canSubmit(): boolean {
    return (
      this.phase === "rating" &&
      this.input.equation_preserved !== null &&
      this.input.numbers_preserved !== null &&
      this.input.semantic_similarity !== null &&
      this.input.grammaticality !== null
    );
  }

  missingFields(): string[] {
    const missing: string[] = [];
    if (this.input.equation_preserved === null) missing.push("equation preserved");
    if (this.input.numbers_preserved === null) missing.push("numbers preserved");
    if (this.input.semantic_similarity === null) missing.push("semantic similarity");
    if (this.input.grammaticality === null) missing.push("grammaticality");
    return missing;
  }

  async submit(): Promise<void> {
    if (this.phase !== "rating" || !this.sample) return;
    if (!this.canSubmit()) {
      this.error = `set ${this.missingFields().join(", ")} before submitting`;
      return;
    }
    const payload: RatingPayload = {
      candidate_id: this.sample.blind_id,
      evaluator_id: this.evaluatorId,
      equation_preserved: this.input.equation_preserved as boolean,
      numbers_preserved: this.input.numbers_preserved as boolean,
      semantic_similarity: this.input.semantic_similarity as number,
      grammaticality: this.input.grammaticality as number,
    };
    await this.send(payload);
  }

  /** Resend the retained rating after a network failure. */
  async retry(): Promise<void> {
    if (this.phase !== "retry" || !this.unsent) return;
    await this.send(this.unsent);
  }

  private async send(payload: RatingPayload): Promise<void> {
    this.phase = "submitting";
    this.banner = null;
    try {
      await this.api.submitRating(payload);
    } catch (err) {
      if (err instanceof ApiError) {
        // service rejected the payload: same sample, form re-enabled inline
        this.phase = "rating";
        this.error = err.message;
        return;
      }
      // network failure: keep the rating visible as unsent
      this.unsent = payload;
      this.phase = "retry";
      this.banner = "could not reach the review service; your rating is kept and can be resent";
      return;
    }
    this.unsent = null;
    this.submitted.push(payload);
    await this.advance();
  }

  /** Personal summary over this evaluator's acknowledged ratings. */
  personalSummary(): PersonalSummary {
    const n = this.submitted.length;
    if (n === 0) {
      return {
        rated: 0,
        equationPreservedPct: 0,
        numbersPreservedPct: 0,
        meanSemanticSimilarity: 0,
        meanGrammaticality: 0,
      };
    }
    const sum = (f: (p: RatingPayload) => number) =>
      this.submitted.reduce((acc, p) => acc + f(p), 0);
    return {
      rated: n,
      equationPreservedPct: (100 * sum((p) => (p.equation_preserved ? 1 : 0))) / n,
      numbersPreservedPct: (100 * sum((p) => (p.numbers_preserved ? 1 : 0))) / n,
      meanSemanticSimilarity: sum((p) => p.semantic_similarity) / n,
      meanGrammaticality: sum((p) => p.grammaticality) / n,
    };
  }
}
