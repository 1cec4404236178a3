/** Thin client for the review service JSON API. The fetch function is
 * injectable so the flow logic can be tested without a browser or server. */

import type { RatingPayload, SamplesPage, SessionInfo } from "./types.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

/** Non-2xx response from the service; 400s carry a human-readable detail. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function detailOf(response: { json(): Promise<unknown> }): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (body && typeof body.detail === "string") return body.detail;
  } catch {
    // fall through to the generic message
  }
  return "request rejected";
}

export class ReviewApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async post(path: string, payload: unknown): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return response.json();
  }

  private async get(path: string): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return response.json();
  }

  async openSession(evaluatorId: string): Promise<SessionInfo> {
    const body = (await this.post("/api/session", { evaluator_id: evaluatorId })) as SessionInfo;
    return {
      session_id: body.session_id,
      evaluator_id: body.evaluator_id,
      total: body.total,
      rated: body.rated,
    };
  }

  async nextSamples(sessionId: string, count: number): Promise<SamplesPage> {
    const body = (await this.get(
      `/api/samples?session=${encodeURIComponent(sessionId)}&count=${count}`,
    )) as SamplesPage;
    return {
      rated: body.rated,
      total: body.total,
      // keep only the blind fields even if the service ever sent more
      samples: (body.samples ?? []).map((s) => ({
        blind_id: s.blind_id,
        original: s.original,
        augmented: s.augmented,
      })),
    };
  }

  async submitRating(payload: RatingPayload): Promise<void> {
    await this.post("/api/ratings", payload);
  }
}
