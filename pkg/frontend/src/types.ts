/** Shared types for the review UI. Samples intentionally carry only the blind
 * id and the two texts: the augmentation method never reaches the browser. */

export interface Sample {
  blind_id: string;
  original: string;
  augmented: string;
}

export interface SessionInfo {
  session_id: string;
  evaluator_id: string;
  total: number;
  rated: number;
}

export interface SamplesPage {
  samples: Sample[];
  rated: number;
  total: number;
}

/** The four judgments, all required before submit enables. */
export interface RatingInput {
  equation_preserved: boolean | null;
  numbers_preserved: boolean | null;
  semantic_similarity: number | null; // 0..1, step 0.05
  grammaticality: number | null; // integer 1..5
}

export interface RatingPayload {
  candidate_id: string;
  evaluator_id: string;
  equation_preserved: boolean;
  numbers_preserved: boolean;
  semantic_similarity: number;
  grammaticality: number;
}

export const SEMANTIC_STEP = 0.05;

export function emptyRating(): RatingInput {
  return {
    equation_preserved: null,
    numbers_preserved: null,
    semantic_similarity: null,
    grammaticality: null,
  };
}
