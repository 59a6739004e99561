/*
 * HTML-string renderers for the result panel. Pure functions of the
 * response payload: numbers are formatted, never recomputed, so what the
 * user sees round-trips from the server.
 */

import type { EmotionEntry, PredictResponse, TopicAttribution } from "./api.js";
import type { ComparisonRow } from "./state.js";

export function fmtProb(p: number): string {
  return p.toFixed(3);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function bar(width: number, cls: string): string {
  const pct = Math.max(0, Math.min(100, width * 100));
  return `<div class="bar ${cls}" style="width:${pct.toFixed(1)}%"></div>`;
}

/** 0-to-1 positive-sentiment gauge. */
export function renderGauge(positivePosterior: number): string {
  return [
    `<div class="gauge" data-value="${fmtProb(positivePosterior)}">`,
    `<div class="gauge-track">${bar(positivePosterior, "gauge-fill")}</div>`,
    `<span class="gauge-label">positive sentiment ${fmtProb(positivePosterior)}</span>`,
    `</div>`,
  ].join("");
}

/** One row per emotion: label plus paired prior/posterior bars. */
export function renderEmotionBars(entries: ReadonlyArray<EmotionEntry>): string {
  const rows = entries.map((e) => [
    `<div class="emotion-row" data-label="${escapeHtml(e.label)}">`,
    `<span class="emotion-label">${escapeHtml(e.label)}</span>`,
    `<div class="pair">`,
    `<div class="track">${bar(e.prior, "prior")}</div>`,
    `<span class="num prior-num">${fmtProb(e.prior)}</span>`,
    `<div class="track">${bar(e.posterior, "posterior")}</div>`,
    `<span class="num posterior-num">${fmtProb(e.posterior)}</span>`,
    `</div>`,
    `</div>`,
  ].join(""));
  return `<div class="emotions">${rows.join("")}</div>`;
}

export function renderTopicChips(attributions: ReadonlyArray<TopicAttribution>): string {
  if (attributions.length === 0) {
    return "";
  }
  const chips = attributions.map((a) =>
    `<span class="chip" title="${escapeHtml(a.top_words.join(", "))}">` +
    `t${a.topic} · ${fmtProb(a.density)} · ${escapeHtml(a.top_words.slice(0, 4).join(" "))}` +
    `</span>`,
  );
  return `<div class="chips">${chips.join("")}</div>`;
}

export function renderWarnings(warnings: ReadonlyArray<string>): string {
  if (warnings.length === 0) {
    return "";
  }
  const items = warnings.map((w) => `<li>${escapeHtml(w)}</li>`);
  return `<ul class="warnings">${items.join("")}</ul>`;
}

export function renderErrorBanner(message: string | null): string {
  if (!message) {
    return "";
  }
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}

export function renderResult(response: PredictResponse): string {
  return [
    renderGauge(response.positive_posterior),
    renderEmotionBars(response.emotions),
    renderTopicChips(response.topic_attribution),
    renderWarnings(response.warnings),
  ].join("");
}

/** Side-by-side posterior diff, one row per emotion, biggest movers first. */
export function renderComparison(rows: ReadonlyArray<ComparisonRow>): string {
  const body = rows.map((r) => {
    const sign = r.delta > 0 ? "+" : "";
    return (
      `<tr data-label="${escapeHtml(r.label)}">` +
      `<td>${escapeHtml(r.label)}</td>` +
      `<td>${fmtProb(r.before)}</td>` +
      `<td>${fmtProb(r.after)}</td>` +
      `<td class="delta">${sign}${fmtProb(r.delta)}</td>` +
      `</tr>`
    );
  });
  return (
    `<table class="compare"><thead>` +
    `<tr><th>emotion</th><th>before</th><th>after</th><th>delta</th></tr>` +
    `</thead><tbody>${body.join("")}</tbody></table>`
  );
}
