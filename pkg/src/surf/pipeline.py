"""End-to-end flows shared by the CLI, the HTTP service, and the harness."""

from __future__ import annotations

from dataclasses import dataclass, field

from .content import PageSource
from .errors import MalformedTrace
from .graph import (
    DEFAULT_DAMPING,
    DEFAULT_EPS,
    DEFAULT_FUSION_WEIGHTS,
    DEFAULT_MAX_ITER,
    TokenScore,
    build_graph,
    export_dot,
    token_scores,
)
from .query import (
    DEFAULT_COMBO,
    DEFAULT_K_TOKENS,
    DEFAULT_TOP_QUERIES,
    Query,
    formulate_queries,
)
from .rank import (
    DEFAULT_RANK_WEIGHTS,
    DEFAULT_TOP_RESULTS,
    RankedResult,
    SearchContext,
    rank,
)
from .search import (
    DEFAULT_CORPUS_CAP,
    Corpus,
    ResponseCache,
    SearchProvider,
    search_all,
)
from .trace import ContextCode, StackTrace, detect_traces, parse_trace, tokenize_code


@dataclass
class QueryRecommendation:
    """Everything the query endpoint returns for one trace."""

    trace: StackTrace
    context_code: ContextCode | None
    scores: list[TokenScore]
    queries: list[Query]
    graph_dot: str


@dataclass
class SearchOutcome:
    query: Query
    corpus: Corpus
    results: list[RankedResult]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "results": [r.to_dict() for r in self.results],
            "warnings": list(self.warnings),
        }


def parse_trace_text(trace_text: str) -> StackTrace:
    """Parse trace_text, tolerating surrounding log noise.

    The first detected trace wins; if detection finds nothing the raw text
    goes to the parser so its error message points at the real problem.
    """
    spans = detect_traces(trace_text)
    if spans:
        return parse_trace(spans[0].text)
    return parse_trace(trace_text)


def recommend_queries(
    trace_text: str,
    code_text: str = "",
    *,
    fusion_weights: tuple[float, float, float] = DEFAULT_FUSION_WEIGHTS,
    damping: float = DEFAULT_DAMPING,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    k_tokens: int = DEFAULT_K_TOKENS,
    combo: int = DEFAULT_COMBO,
    top_q: int = DEFAULT_TOP_QUERIES,
) -> QueryRecommendation:
    if not trace_text or not trace_text.strip():
        raise MalformedTrace("empty trace text")
    trace = parse_trace_text(trace_text)
    context_code = tokenize_code(code_text) if code_text and code_text.strip() else None

    scores = token_scores(
        trace,
        context_code,
        weights=fusion_weights,
        damping=damping,
        eps=eps,
        max_iter=max_iter,
    )
    queries = formulate_queries(
        scores,
        trace.exception_simple_name,
        k_tokens=k_tokens,
        combo=combo,
        top_q=top_q,
    )
    graph_dot = export_dot(build_graph(trace), scores)
    return QueryRecommendation(
        trace=trace,
        context_code=context_code,
        scores=scores,
        queries=queries,
        graph_dot=graph_dot,
    )


def execute_search(
    query: Query | str,
    providers: list[SearchProvider],
    *,
    trace: StackTrace | None = None,
    context_code: ContextCode | None = None,
    associate_context: bool = True,
    weights: tuple[float, float, float, float] = DEFAULT_RANK_WEIGHTS,
    top_n: int = DEFAULT_TOP_RESULTS,
    corpus_cap: int = DEFAULT_CORPUS_CAP,
    page_source: PageSource | None = None,
    response_cache: ResponseCache | None = None,
) -> SearchOutcome:
    """Fan out one query, fetch pages, and rank the merged corpus.

    Context association silently turns off when there is nothing to
    associate (no trace and no context code).
    """
    if isinstance(query, str):
        query = Query.keyword(query)

    corpus = search_all(query, providers, corpus_cap=corpus_cap, cache=response_cache)

    pages = {}
    if page_source is not None:
        pages = page_source.fetch_many([entry.canonical_url for entry in corpus.entries])

    has_code = context_code is not None and not context_code.empty
    context = SearchContext(
        query=query,
        trace=trace,
        context_code=context_code,
        associate_context=associate_context and (trace is not None or has_code),
    )
    limit = max((p.config.per_provider_limit for p in providers), default=30)
    results = rank(
        corpus,
        pages,
        context,
        weights,
        top_n=top_n,
        per_provider_limit=limit,
    )
    return SearchOutcome(
        query=query, corpus=corpus, results=results, warnings=list(corpus.warnings)
    )
