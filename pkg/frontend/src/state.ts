/*
 * Dashboard view state: draft text, the last applied response, request
 * status, and an append-only session history.
 *
 * Requests carry a sequence number; a response is applied only if no newer
 * submit happened while it was in flight, so at most one request is ever
 * "live" and stale responses are dropped silently. On error the previous
 * result is retained and only the banner changes.
 */

import { PredictError, type PredictResponse } from "./api.js";

export type RequestStatus = "idle" | "in-flight" | "error";

export type HistoryEntry = {
  text: string;
  response: PredictResponse;
};

export type ViewState = {
  draft: string;
  last: PredictResponse | null;
  status: RequestStatus;
  error: string | null;
  history: ReadonlyArray<HistoryEntry>;
};

export type ComparisonRow = {
  label: string;
  before: number;
  after: number;
  delta: number;
};

export interface PredictApi {
  predict(text: string, topK: number): Promise<PredictResponse>;
}

/** How many emotions to request: large enough for the full ranking on
 *  realistic models, so displayed posteriors sum to ~1. */
export const DEFAULT_TOP_K = 50;

export class DashboardStore {
  private seq = 0;
  private history: HistoryEntry[] = [];
  private current: ViewState = {
    draft: "",
    last: null,
    status: "idle",
    error: null,
    history: [],
  };

  constructor(
    private readonly api: PredictApi,
    private readonly onChange: (state: ViewState) => void = () => {},
    private readonly topK: number = DEFAULT_TOP_K,
  ) {}

  get state(): ViewState {
    return this.current;
  }

  setDraft(text: string): void {
    this.update({ draft: text });
  }

  canSubmit(): boolean {
    return this.current.draft.trim().length > 0;
  }

  /** Submit the draft (or an explicit text). Empty text is a no-op; a newer
   *  submit supersedes any in-flight one. Resolves once this request is
   *  settled (applied, superseded, or failed). */
  async submit(text?: string): Promise<ViewState> {
    const query = (text ?? this.current.draft).trim();
    if (!query) {
      return this.current;
    }
    const ticket = ++this.seq;
    this.update({ draft: query, status: "in-flight" });
    try {
      const response = await this.api.predict(query, this.topK);
      if (ticket !== this.seq) {
        return this.current; // superseded while in flight
      }
      this.history = [...this.history, { text: query, response }];
      this.update({ last: response, status: "idle", error: null, history: this.history });
    } catch (err) {
      if (ticket !== this.seq) {
        return this.current;
      }
      const message = err instanceof PredictError
        ? `${err.message} (${err.code})`
        : err instanceof Error ? err.message : String(err);
      this.update({ status: "error", error: message }); // previous result retained
    }
    return this.current;
  }

  /** Per-emotion posterior deltas between history entries i and j (j minus
   *  i), sorted by descending absolute change. Labels missing from one
   *  entry's returned list count as zero there. */
  compare(i: number, j: number): ComparisonRow[] {
    const a = this.history[i];
    const b = this.history[j];
    if (!a || !b) {
      throw new RangeError(`history indices out of range: ${i}, ${j}`);
    }
    const before = new Map(a.response.emotions.map((e) => [e.label, e.posterior]));
    const after = new Map(b.response.emotions.map((e) => [e.label, e.posterior]));
    const labels = new Set([...before.keys(), ...after.keys()]);
    const rows: ComparisonRow[] = [];
    for (const label of labels) {
      const x = before.get(label) ?? 0;
      const y = after.get(label) ?? 0;
      rows.push({ label, before: x, after: y, delta: y - x });
    }
    rows.sort((p, q) => Math.abs(q.delta) - Math.abs(p.delta) || p.label.localeCompare(q.label));
    return rows;
  }

  private update(patch: Partial<ViewState>): void {
    this.current = { ...this.current, ...patch };
    this.onChange(this.current);
  }
}
