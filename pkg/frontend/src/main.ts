/** Browser bootstrap: wires the pure modules to the live document. */

import { ApiError, SurfClient } from "./api.js";
import { renderGraphSvg } from "./dot.js";
import {
  renderCompletions,
  renderError,
  renderQueryList,
  renderResults,
  renderSortHeader,
  renderWarnings,
  renderWatchBanner,
} from "./render.js";
import {
  UiSearchState,
  completionTokens,
  displayedResults,
  initialState,
  selectQuery,
  selectResult,
  sortedBy,
  withError,
  withInputs,
  withMode,
  withQueries,
  withResults,
} from "./state.js";
import type { MetricKey } from "./state.js";

const WATCH_POLL_MS = 3000;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

const traceInput = el<HTMLTextAreaElement>("trace-input");
const codeInput = el<HTMLTextAreaElement>("code-input");
const recommendButton = el<HTMLButtonElement>("recommend-button");
const searchButton = el<HTMLButtonElement>("search-button");
const contextToggle = el<HTMLInputElement>("context-toggle");
const watchToggle = el<HTMLInputElement>("watch-toggle");
const queryInput = el<HTMLInputElement>("query-input");
const completionList = el<HTMLDataListElement>("query-completions");
const errorBox = el<HTMLDivElement>("error-box");
const queryPanel = el<HTMLDivElement>("query-panel-body");
const graphPanel = el<HTMLDivElement>("graph-panel");
const sortHeader = el<HTMLDivElement>("sort-header");
const resultPanel = el<HTMLDivElement>("result-panel-body");
const warningsBox = el<HTMLDivElement>("warnings-box");
const watchBanner = el<HTMLDivElement>("watch-banner");
const pageFrame = el<HTMLIFrameElement>("page-frame");
const pagePlaceholder = el<HTMLDivElement>("page-placeholder");
const externalLink = el<HTMLAnchorElement>("external-link");

const client = new SurfClient((url, init) => window.fetch(url, init));
let state: UiSearchState = initialState();
let watchTimer: number | null = null;
let lastWatchTimestamp = 0;

function apply(next: UiSearchState): void {
  state = next;
  renderAll();
}

function renderAll(): void {
  recommendButton.disabled = !traceInput.value.trim();
  searchButton.disabled = !traceInput.value.trim() && !queryInput.value.trim();
  errorBox.innerHTML = renderError(state.error);
  queryPanel.innerHTML = renderQueryList(state.queries, state.selectedQuery);
  graphPanel.innerHTML = state.graphDot ? renderGraphSvg(state.graphDot) : "";
  completionList.innerHTML = renderCompletions(completionTokens(state));
  sortHeader.innerHTML = state.results.length ? renderSortHeader(state.sortBy) : "";
  resultPanel.innerHTML = renderResults(displayedResults(state), state.selectedUrl);
  warningsBox.innerHTML = renderWarnings(state.warnings);
  renderPagePanel();
}

function renderPagePanel(): void {
  if (state.selectedUrl) {
    pageFrame.hidden = false;
    pagePlaceholder.hidden = true;
    if (pageFrame.src !== state.selectedUrl) pageFrame.src = state.selectedUrl;
    externalLink.href = state.selectedUrl;
    externalLink.hidden = false;
  } else {
    pageFrame.hidden = true;
    pageFrame.removeAttribute("src");
    pagePlaceholder.hidden = false;
    externalLink.hidden = true;
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof DOMException && error.name === "AbortError") return "";
  return "service unreachable";
}

async function recommend(): Promise<void> {
  apply(withInputs(state, traceInput.value, codeInput.value));
  try {
    const response = await client.recommend(state.trace, state.code);
    apply(withQueries(state, response.queries, response.graph_dot));
    if (state.selectedQuery) {
      queryInput.value = state.selectedQuery;
      await runSearch();
    }
  } catch (error) {
    const message = describe(error);
    if (message) apply(withError(state, message));
  }
}

async function runSearch(): Promise<void> {
  apply(withInputs(state, traceInput.value, codeInput.value));
  try {
    const response = await client.search({
      trace: state.trace,
      code: state.code,
      query: queryInput.value === state.selectedQuery ? "" : queryInput.value,
      associateContext: state.associateContext,
    });
    apply(withResults(state, response.results, response.warnings));
  } catch (error) {
    const message = describe(error);
    if (message) apply(withError(state, message));
  }
}

recommendButton.addEventListener("click", () => void recommend());
searchButton.addEventListener("click", () => void runSearch());
traceInput.addEventListener("input", () => renderAll());
queryInput.addEventListener("input", () => renderAll());

contextToggle.addEventListener("change", () => {
  state = { ...state, associateContext: contextToggle.checked };
  if (state.results.length || state.selectedQuery) void runSearch();
});

queryPanel.addEventListener("click", (event) => {
  const button = (event.target as HTMLElement).closest<HTMLElement>("[data-query]");
  if (!button) return;
  const text = button.dataset.query ?? "";
  apply(selectQuery(state, text));
  queryInput.value = text;
  void runSearch();
});

sortHeader.addEventListener("click", (event) => {
  const button = (event.target as HTMLElement).closest<HTMLElement>("[data-sort]");
  if (!button) return;
  const key = button.dataset.sort;
  apply(sortedBy(state, key ? (key as MetricKey) : null));
});

resultPanel.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.closest("a")) return;
  const row = target.closest<HTMLElement>("[data-url]");
  if (row) apply(selectResult(state, row.dataset.url ?? ""));
});

async function pollWatch(): Promise<void> {
  try {
    const event = await client.latestWatchEvent();
    if (event && event.timestamp > lastWatchTimestamp) {
      lastWatchTimestamp = event.timestamp;
      watchBanner.innerHTML = renderWatchBanner(event.exception, event.query.text);
      queryInput.value = event.query.text;
      apply(selectQuery(state, ""));
      void runSearch();
    }
  } catch {
    // polling is best-effort; the next tick retries
  }
}

watchToggle.addEventListener("change", () => {
  apply(withMode(state, watchToggle.checked ? "watch-feed" : "interactive"));
  if (watchToggle.checked) {
    watchTimer = window.setInterval(() => void pollWatch(), WATCH_POLL_MS);
    void pollWatch();
  } else if (watchTimer !== null) {
    window.clearInterval(watchTimer);
    watchTimer = null;
    watchBanner.innerHTML = "";
  }
});

renderAll();
