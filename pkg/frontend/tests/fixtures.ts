/* Captured verbatim from the prediction service running the four-document
 * example model (epsilon 0) for the query "va vb va vd". */

import type { PredictResponse } from "../src/api.js";

export const TOY_RESPONSE: PredictResponse = {
  schema_version: 1,
  positive_posterior: 0.5870433367844994,
  emotions: [
    { label: "e1", prior: 0.4, posterior: 0.5870433367844994 },
    { label: "e2", prior: 0.2, posterior: 0.36968326747945146 },
    { label: "e3", prior: 0.4, posterior: 0.0432733957360492 },
  ],
  topic_attribution: [
    { topic: 0, top_words: ["va", "vb"], density: 0.75 },
    { topic: 2, top_words: ["vd"], density: 0.25 },
  ],
  warnings: [],
};

export function responseWith(
  posteriors: Record<string, number>,
  positive: number,
): PredictResponse {
  return {
    schema_version: 1,
    positive_posterior: positive,
    emotions: Object.entries(posteriors).map(([label, posterior]) => ({
      label,
      prior: 1 / Object.keys(posteriors).length,
      posterior,
    })),
    topic_attribution: [],
    warnings: [],
  };
}
