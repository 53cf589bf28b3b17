/** Wire types and the HTTP client for the surf JSON service.
 *
 * The client never touches the DOM and takes its fetch function as a
 * constructor argument, so everything here is testable without a browser.
 */

export interface QueryRow {
  text: string;
  score: number;
  tokens: string[];
}

export interface QueriesResponse {
  queries: QueryRow[];
  graph_dot: string;
}

export interface ResultRow {
  url: string;
  title: string;
  rank: number;
  content_relevance: number;
  context_relevance: number;
  engine_confidence: number;
  popularity: number;
  final_score: number;
  providers: string[];
}

export interface SearchResponse {
  results: ResultRow[];
  warnings: string[];
}

export interface WatchEventPayload {
  exception: string;
  query: { text: string; score: number; tokens: string[] };
  timestamp: number;
  source: string;
}

export interface QueriesRequest {
  trace_text: string;
  context_code?: string;
}

export interface SearchRequest {
  query?: string;
  trace_text?: string;
  context_code?: string;
  associate_context: boolean;
}

/** Inputs the search panel owns; the request body is derived from these. */
export interface SearchInputs {
  trace: string;
  code: string;
  query: string;
  associateContext: boolean;
}

/** Build the /api/search body. Blank inputs stay off the wire entirely so
 * toggling one control never changes any other field. */
export function buildSearchBody(inputs: SearchInputs): SearchRequest {
  const body: SearchRequest = { associate_context: inputs.associateContext };
  if (inputs.query.trim()) body.query = inputs.query;
  if (inputs.trace.trim()) body.trace_text = inputs.trace;
  if (inputs.code.trim()) body.context_code = inputs.code;
  return body;
}

export function buildQueriesBody(trace: string, code: string): QueriesRequest {
  const body: QueriesRequest = { trace_text: trace };
  if (code.trim()) body.context_code = code;
  return body;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function post<T>(fetchFn: FetchLike, url: string, body: unknown, signal?: AbortSignal): Promise<T> {
  const response = await fetchFn(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
  const payload = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, (payload as { error?: string }).error ?? response.statusText);
  }
  return payload as T;
}

/** Thin client keeping at most one search in flight; a new search aborts
 * the previous one so a slow response can never overwrite a newer one. */
export class SurfClient {
  private searchAbort: AbortController | null = null;

  constructor(private readonly fetchFn: FetchLike, private readonly base = "") {}

  recommend(trace: string, code: string): Promise<QueriesResponse> {
    return post(this.fetchFn, `${this.base}/api/queries`, buildQueriesBody(trace, code));
  }

  search(inputs: SearchInputs): Promise<SearchResponse> {
    this.searchAbort?.abort();
    const controller = new AbortController();
    this.searchAbort = controller;
    return post(this.fetchFn, `${this.base}/api/search`, buildSearchBody(inputs), controller.signal);
  }

  async latestWatchEvent(): Promise<WatchEventPayload | null> {
    const response = await this.fetchFn(`${this.base}/api/watch/latest`);
    const payload = (await response.json()) as { event: WatchEventPayload | null };
    return payload.event;
  }
}
