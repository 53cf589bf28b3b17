/** Pure state container for the single-page client.
 *
 * Every transition returns a new state object; rendering reads from the
 * state and never recomputes anything the server already decided.
 */

import type { QueryRow, ResultRow } from "./api.js";

export type Mode = "interactive" | "watch-feed";

export type MetricKey =
  | "content_relevance"
  | "context_relevance"
  | "engine_confidence"
  | "popularity";

export interface UiSearchState {
  trace: string;
  code: string;
  queries: QueryRow[];
  graphDot: string;
  selectedQuery: string;
  associateContext: boolean;
  results: ResultRow[];
  warnings: string[];
  sortBy: MetricKey | null;
  selectedUrl: string | null;
  mode: Mode;
  error: string | null;
}

export function initialState(): UiSearchState {
  return {
    trace: "",
    code: "",
    queries: [],
    graphDot: "",
    selectedQuery: "",
    associateContext: true,
    results: [],
    warnings: [],
    sortBy: null,
    selectedUrl: null,
    mode: "interactive",
    error: null,
  };
}

export function withInputs(state: UiSearchState, trace: string, code: string): UiSearchState {
  return { ...state, trace, code };
}

/** Install a recommendation response; the best query becomes the selection. */
export function withQueries(state: UiSearchState, queries: QueryRow[], graphDot: string): UiSearchState {
  return {
    ...state,
    queries,
    graphDot,
    selectedQuery: queries.length ? queries[0].text : "",
    error: null,
  };
}

export function selectQuery(state: UiSearchState, text: string): UiSearchState {
  return { ...state, selectedQuery: text };
}

export function toggleContext(state: UiSearchState): UiSearchState {
  return { ...state, associateContext: !state.associateContext };
}

export function withResults(state: UiSearchState, results: ResultRow[], warnings: string[]): UiSearchState {
  return { ...state, results, warnings, sortBy: null, selectedUrl: null, error: null };
}

export function selectResult(state: UiSearchState, url: string): UiSearchState {
  return { ...state, selectedUrl: url };
}

export function withError(state: UiSearchState, message: string): UiSearchState {
  return { ...state, error: message };
}

export function withMode(state: UiSearchState, mode: Mode): UiSearchState {
  return { ...state, mode };
}

export function sortedBy(state: UiSearchState, key: MetricKey | null): UiSearchState {
  return { ...state, sortBy: key };
}

/** Rows in display order: the server's order, or one metric column
 * descending when a column header is active. Values are never changed. */
export function displayedResults(state: UiSearchState): ResultRow[] {
  if (!state.sortBy) return state.results;
  const key = state.sortBy;
  return [...state.results].sort((a, b) => b[key] - a[key]);
}

/** Auto-completion pool: every distinct token across the recommendations,
 * best query first, original casing kept. */
export function completionTokens(state: UiSearchState): string[] {
  const seen = new Set<string>();
  const pool: string[] = [];
  for (const query of state.queries) {
    for (const token of query.tokens) {
      const lowered = token.toLowerCase();
      if (!seen.has(lowered)) {
        seen.add(lowered);
        pool.push(token);
      }
    }
  }
  return pool;
}

export function completeQuery(state: UiSearchState, prefix: string): string[] {
  const needle = prefix.toLowerCase();
  return completionTokens(state)
    .filter((token) => token.toLowerCase().startsWith(needle))
    .slice(0, 10);
}
