// Rendering contract against the recorded service responses: the page shows
// exactly what the JSON says, to three decimals, with one bar per metric.
import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import type { QueriesResponse, SearchResponse } from "../src/api.js";
import {
  METRIC_COLUMNS,
  renderError,
  renderQueryList,
  renderResults,
  renderSortHeader,
  renderWarnings,
} from "../src/render.js";

const queriesResponse: QueriesResponse = JSON.parse(
  readFileSync(
    new URL("../../fixtures/scenarios/cme-arraylist/golden_queries_response.json", import.meta.url),
    "utf-8",
  ),
);

const searchResponse: SearchResponse = JSON.parse(
  readFileSync(
    new URL("../../fixtures/scenarios/cme-arraylist/golden_search_response.json", import.meta.url),
    "utf-8",
  ),
);

function countOf(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("query list", () => {
  it("renders all five recommended queries as clickable options", () => {
    const html = renderQueryList(queriesResponse.queries, "");
    expect(queriesResponse.queries).toHaveLength(5);
    expect(countOf(html, 'class="query-option"')).toBe(5);
    for (const query of queriesResponse.queries) {
      expect(html).toContain(`data-query="${query.text}"`);
    }
  });

  it("shows each query score to three decimals", () => {
    const html = renderQueryList(queriesResponse.queries, "");
    for (const query of queriesResponse.queries) {
      expect(html).toContain(`<span class="query-score">${query.score.toFixed(3)}</span>`);
    }
  });

  it("marks only the selected query", () => {
    const selected = queriesResponse.queries[2].text;
    const html = renderQueryList(queriesResponse.queries, selected);
    expect(countOf(html, "query-option selected")).toBe(1);
  });
});

describe("result list", () => {
  it("renders thirty rows with four metric bars each", () => {
    const html = renderResults(searchResponse.results);
    expect(searchResponse.results).toHaveLength(30);
    expect(countOf(html, 'class="result-row"')).toBe(30);
    expect(countOf(html, "bar-fill")).toBe(30 * 4);
  });

  it("shows every metric value exactly as the JSON, to three decimals", () => {
    const html = renderResults(searchResponse.results);
    const shownValues = [...html.matchAll(/<span class="metric-value">([\d.]+)<\/span>/g)].map(
      (m) => m[1],
    );
    const expected = searchResponse.results.flatMap((row) =>
      METRIC_COLUMNS.map(({ key }) => row[key].toFixed(3)),
    );
    expect(shownValues).toEqual(expected);
  });

  it("keeps the server order and rank numbers", () => {
    const html = renderResults(searchResponse.results);
    const urls = [...html.matchAll(/data-url="([^"]+)"/g)].map((m) => m[1]);
    expect(urls).toEqual(searchResponse.results.map((row) => row.url));
    const ranks = [...html.matchAll(/<span class="result-rank">(\d+)<\/span>/g)].map((m) =>
      Number(m[1]),
    );
    expect(ranks).toEqual(searchResponse.results.map((row) => row.rank));
  });

  it("sizes each bar by the metric value", () => {
    const row = searchResponse.results[0];
    const html = renderResults([row]);
    for (const { key } of METRIC_COLUMNS) {
      expect(html).toContain(`width:${(row[key] * 100).toFixed(2)}%`);
    }
    const half = renderResults([{ ...row, popularity: 0.5 }]);
    expect(half).toContain("width:50.00%");
  });

  it("escapes markup in titles and urls", () => {
    const row = { ...searchResponse.results[0], title: 'x<script>alert("1")</script>' };
    const html = renderResults([row]);
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("chrome", () => {
  it("renders an error banner only when there is an error", () => {
    expect(renderError(null)).toBe("");
    expect(renderError("empty trace text")).toContain("empty trace text");
    expect(renderError("<b>")).toContain("&lt;b&gt;");
  });

  it("renders warnings as a list", () => {
    expect(renderWarnings([])).toBe("");
    const html = renderWarnings(["bing: quota exceeded"]);
    expect(countOf(html, "<li>")).toBe(1);
  });

  it("offers one sort button per metric plus server order", () => {
    const html = renderSortHeader(null);
    expect(countOf(html, "data-sort=")).toBe(METRIC_COLUMNS.length + 1);
    expect(countOf(html, "active")).toBe(1);
  });
});
