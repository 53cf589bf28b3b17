/** HTML renderers: pure functions from state to markup strings.
 *
 * Keeping these string-valued means the whole presentation layer is
 * testable in Node, and the live page only does innerHTML swaps plus
 * event delegation in main.ts.
 */

import type { QueryRow, ResultRow } from "./api.js";
import type { MetricKey } from "./state.js";

export const METRIC_COLUMNS: { key: MetricKey; label: string }[] = [
  { key: "content_relevance", label: "content" },
  { key: "context_relevance", label: "context" },
  { key: "engine_confidence", label: "engine" },
  { key: "popularity", label: "popularity" },
];

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Three decimals everywhere a score is shown, matching the service JSON. */
export function formatScore(value: number): string {
  return value.toFixed(3);
}

export function renderQueryList(queries: QueryRow[], selectedText: string): string {
  if (!queries.length) return '<p class="placeholder">No recommendations yet.</p>';
  const items = queries
    .map((query, index) => {
      const selected = query.text === selectedText ? " selected" : "";
      return (
        `<li><button type="button" class="query-option${selected}" data-query="${escapeHtml(query.text)}">` +
        `<span class="query-rank">${index + 1}.</span> ` +
        `<span class="query-text">${escapeHtml(query.text)}</span>` +
        `<span class="query-score">${formatScore(query.score)}</span>` +
        `</button></li>`
      );
    })
    .join("");
  return `<ol class="query-list">${items}</ol>`;
}

function metricBar(key: MetricKey, label: string, value: number): string {
  const width = (value * 100).toFixed(2);
  return (
    `<div class="metric" data-metric="${key}">` +
    `<span class="metric-label">${label}</span>` +
    `<span class="bar"><span class="bar-fill" style="width:${width}%"></span></span>` +
    `<span class="metric-value">${formatScore(value)}</span>` +
    `</div>`
  );
}

export function renderResultRow(row: ResultRow, selectedUrl: string | null): string {
  const selected = row.url === selectedUrl ? " selected" : "";
  const bars = METRIC_COLUMNS.map(({ key, label }) => metricBar(key, label, row[key])).join("");
  return (
    `<li class="result-row${selected}" data-url="${escapeHtml(row.url)}">` +
    `<div class="result-head">` +
    `<span class="result-rank">${row.rank}</span>` +
    `<a class="result-title" href="${escapeHtml(row.url)}" target="_blank" rel="noopener">` +
    `${escapeHtml(row.title)}</a>` +
    `<span class="result-final" title="final score">${formatScore(row.final_score)}</span>` +
    `</div>` +
    `<div class="result-metrics">${bars}</div>` +
    `<div class="result-providers">${row.providers.map(escapeHtml).join(", ")}</div>` +
    `</li>`
  );
}

export function renderResults(rows: ResultRow[], selectedUrl: string | null = null): string {
  if (!rows.length) return '<p class="placeholder">Run a search to see ranked results.</p>';
  return `<ul class="result-list">${rows.map((row) => renderResultRow(row, selectedUrl)).join("")}</ul>`;
}

export function renderSortHeader(active: MetricKey | null): string {
  const buttons = METRIC_COLUMNS.map(({ key, label }) => {
    const cls = key === active ? "sort-button active" : "sort-button";
    return `<button type="button" class="${cls}" data-sort="${key}">${label}</button>`;
  }).join("");
  const server = active === null ? "sort-button active" : "sort-button";
  return `<button type="button" class="${server}" data-sort="">server order</button>${buttons}`;
}

export function renderWarnings(warnings: string[]): string {
  if (!warnings.length) return "";
  const items = warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("");
  return `<ul class="warnings">${items}</ul>`;
}

export function renderError(message: string | null): string {
  return message ? `<div class="error-banner" role="alert">${escapeHtml(message)}</div>` : "";
}

export function renderCompletions(tokens: string[]): string {
  return tokens.map((t) => `<option value="${escapeHtml(t)}"></option>`).join("");
}

export function renderWatchBanner(exception: string, queryText: string): string {
  return (
    `<div class="watch-banner">Watched failure <code>${escapeHtml(exception)}</code>` +
    ` &rarr; <code>${escapeHtml(queryText)}</code></div>`
  );
}
