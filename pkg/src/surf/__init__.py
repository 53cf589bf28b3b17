"""Context-aware meta search for programming errors and exceptions.

Feed it a stack trace (and, ideally, the code that produced it); it
recommends ranked search queries, fans them out to several search
providers, and re-ranks the merged results on content relevance, context
relevance, engine confidence, and popularity.
"""

from .errors import (
    AllProvidersFailed,
    EmptyCandidate,
    EmptyCorpus,
    EmptyTokenSet,
    FetchError,
    InvalidUrl,
    MalformedTrace,
    ProviderError,
    SurfError,
)
from .graph import TokenGraph, TokenScore, build_graph, pagerank, token_scores
from .pipeline import execute_search, recommend_queries
from .query import Query, complete_query, formulate_queries
from .rank import RankedResult, SearchContext, rank
from .search import Corpus, CorpusEntry, ProviderHit, canonicalize_url, search_all
from .trace import StackTrace, detect_traces, extract_tokens, parse_trace, tokenize_code

__version__ = "1.0.0"

__all__ = [
    "AllProvidersFailed",
    "Corpus",
    "CorpusEntry",
    "EmptyCandidate",
    "EmptyCorpus",
    "EmptyTokenSet",
    "FetchError",
    "InvalidUrl",
    "MalformedTrace",
    "ProviderError",
    "ProviderHit",
    "Query",
    "RankedResult",
    "SearchContext",
    "StackTrace",
    "SurfError",
    "TokenGraph",
    "TokenScore",
    "build_graph",
    "canonicalize_url",
    "complete_query",
    "detect_traces",
    "execute_search",
    "extract_tokens",
    "formulate_queries",
    "pagerank",
    "parse_trace",
    "rank",
    "recommend_queries",
    "search_all",
    "token_scores",
    "tokenize_code",
    "__version__",
]
