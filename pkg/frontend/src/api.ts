/*
 * Typed client for the prediction service. The dashboard never recomputes
 * model math; everything rendered comes straight from these payloads.
 */

export type EmotionEntry = {
  label: string;
  prior: number;
  posterior: number;
};

export type TopicAttribution = {
  topic: number;
  top_words: string[];
  density: number;
};

export type PredictResponse = {
  schema_version: number;
  positive_posterior: number;
  emotions: EmotionEntry[];
  topic_attribution: TopicAttribution[];
  warnings: string[];
};

export class PredictError extends Error {
  constructor(readonly code: string, message: string) {
    super(message);
    this.name = "PredictError";
  }
}

export type Fetcher = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetcher: Fetcher = fetch,
  ) {}

  /** POST /predict; throws PredictError with the service's machine-readable
   *  code on 4xx, or code "network" when the request itself fails. */
  async predict(text: string, topK: number): Promise<PredictResponse> {
    let resp: Response;
    try {
      resp = await this.fetcher(`${this.baseUrl}/predict`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ text, top_k: topK }),
      });
    } catch (err) {
      throw new PredictError("network", err instanceof Error ? err.message : String(err));
    }
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      // fall through; handled below via status
    }
    if (!resp.ok) {
      const error = (body as { error?: { code?: string; message?: string } } | null)?.error;
      throw new PredictError(
        error?.code ?? `http_${resp.status}`,
        error?.message ?? `request failed with status ${resp.status}`,
      );
    }
    return body as PredictResponse;
  }
}
