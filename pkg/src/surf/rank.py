"""Result ranking: four bounded metrics fused by configurable weights.

Metrics per corpus entry: content relevance (TF cosine of page text
against the query and exception terms, title counted twice), context
relevance (TF cosine of page code blocks against trace tokens and the
caller's code identifiers), engine confidence (rank mass across
providers), and popularity (Q&A votes normalized by the corpus maximum).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .content import PageContent
from .errors import EmptyCorpus
from .query import Query
from .search import DEFAULT_PER_PROVIDER_LIMIT, Corpus, CorpusEntry
from .trace import ContextCode, StackTrace, split_words

DEFAULT_RANK_WEIGHTS = (0.25, 0.25, 0.25, 0.25)
DEFAULT_TOP_RESULTS = 30
_TITLE_WEIGHT = 2
_NO_VOTE_POPULARITY = 0.5


@dataclass(frozen=True)
class SearchContext:
    """Everything known about the failure when a search is issued."""

    query: Query
    trace: StackTrace | None = None
    context_code: ContextCode | None = None
    associate_context: bool = True

    @property
    def context_available(self) -> bool:
        if not self.associate_context:
            return False
        has_code = self.context_code is not None and not self.context_code.empty
        return self.trace is not None or has_code


@dataclass(frozen=True)
class RankedResult:
    canonical_url: str
    title: str
    rank: int
    content_relevance: float
    context_relevance: float
    engine_confidence: float
    popularity: float
    final_score: float
    providers: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "url": self.canonical_url,
            "title": self.title,
            "rank": self.rank,
            "content_relevance": round(self.content_relevance, 6),
            "context_relevance": round(self.context_relevance, 6),
            "engine_confidence": round(self.engine_confidence, 6),
            "popularity": round(self.popularity, 6),
            "final_score": round(self.final_score, 6),
            "providers": list(self.providers),
        }


@dataclass
class RankingDebug:
    """Per-entry metric breakdown retained for the evaluation report."""

    weights_used: tuple[float, float, float, float] = DEFAULT_RANK_WEIGHTS
    context_active: bool = True
    metrics: dict[str, tuple[float, float, float, float]] = field(default_factory=dict)


def term_vector(text: str) -> Counter:
    return Counter(split_words(text))


def cosine(a: Counter, b: Counter) -> float:
    """TF cosine without IDF; 0.0 when either vector is empty."""
    if not a or not b:
        return 0.0
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    dot = sum(count * large[term] for term, count in small.items() if term in large)
    if dot == 0:
        return 0.0
    norm = math.sqrt(sum(c * c for c in a.values())) * math.sqrt(sum(c * c for c in b.values()))
    return dot / norm


def _query_vector(context: SearchContext) -> Counter:
    vec = term_vector(context.query.text)
    if context.trace is not None:
        vec.update(split_words(context.trace.exception_simple_name))
        if context.trace.message:
            vec.update(split_words(context.trace.message))
    return vec


def _context_vector(context: SearchContext) -> Counter:
    vec: Counter = Counter()
    if context.trace is not None:
        from .trace import extract_tokens

        for token in extract_tokens(context.trace):
            vec.update(split_words(token.text))
    if context.context_code is not None:
        vec.update(context.context_code.identifier_bag)
    return vec


def content_relevance(page: PageContent, query_vec: Counter) -> float:
    page_vec = Counter()
    for term, count in term_vector(page.title).items():
        page_vec[term] += count * _TITLE_WEIGHT
    page_vec.update(term_vector(page.body_text))
    return cosine(page_vec, query_vec)


def context_relevance(page: PageContent, context_vec: Counter) -> float:
    if not page.code_blocks or not context_vec:
        return 0.0
    code_vec = term_vector("\n".join(page.code_blocks))
    return cosine(code_vec, context_vec)


def engine_confidence(
    entry: CorpusEntry,
    providers_active: int,
    per_provider_limit: int = DEFAULT_PER_PROVIDER_LIMIT,
) -> float:
    """Rank mass over active providers: ((K - rank + 1) / K summed) / active."""
    k = max(per_provider_limit, 1)
    mass = 0.0
    for hit in entry.hits:
        position = min(hit.provider_rank, k)
        mass += (k - position + 1) / k
    return min(mass / max(providers_active, 1), 1.0)


def popularity(entry: CorpusEntry, max_votes: int) -> float:
    votes = entry.vote_score()
    if votes is None:
        return _NO_VOTE_POPULARITY
    if max_votes <= 0:
        return 0.0
    return min(max(votes, 0) / max_votes, 1.0)


def effective_weights(
    weights: tuple[float, float, float, float], context_active: bool
) -> tuple[float, float, float, float]:
    """Drop the context weight and spread it pro rata when context is off."""
    _check_weights(weights)
    if context_active:
        return weights
    w_content, w_context, w_engine, w_pop = weights
    rest = w_content + w_engine + w_pop
    if rest <= 0.0:
        # All mass sat on context relevance: fall back to an even split.
        return (1 / 3, 0.0, 1 / 3, 1 / 3)
    scale = (w_content + w_context + w_engine + w_pop) / rest
    return (w_content * scale, 0.0, w_engine * scale, w_pop * scale)


def _check_weights(weights) -> None:
    if len(weights) != 4:
        raise ValueError("rank weights must have 4 entries")
    if any(w < 0 for w in weights):
        raise ValueError("rank weights must be non-negative")
    if abs(sum(weights) - 1.0) > 1e-6:
        raise ValueError("rank weights must sum to 1.0")


def _pseudo_page(entry: CorpusEntry) -> PageContent:
    """Stand-in page when the fetch failed: title plus provider snippets."""
    snippets = " ".join(hit.snippet for hit in entry.hits if hit.snippet)
    return PageContent(url=entry.canonical_url, title=entry.best_title, body_text=snippets)


def rank(
    corpus: Corpus,
    pages: dict[str, PageContent],
    context: SearchContext,
    weights: tuple[float, float, float, float] = DEFAULT_RANK_WEIGHTS,
    *,
    top_n: int = DEFAULT_TOP_RESULTS,
    per_provider_limit: int = DEFAULT_PER_PROVIDER_LIMIT,
    debug: RankingDebug | None = None,
) -> list[RankedResult]:
    """Score every corpus entry and return the top slice, rank 1-based.

    Entries whose page fetch failed are scored from their title and
    snippets.  Ties break on engine confidence, then canonical URL.
    """
    if not corpus.entries:
        raise EmptyCorpus("nothing to rank")

    context_active = context.context_available
    w = effective_weights(weights, context_active)
    if debug is not None:
        debug.weights_used = w
        debug.context_active = context_active

    query_vec = _query_vector(context)
    context_vec = _context_vector(context) if context_active else Counter()
    max_votes = max(
        (entry.vote_score() or 0 for entry in corpus.entries),
        default=0,
    )

    scored: list[RankedResult] = []
    for entry in corpus.entries:
        page = pages.get(entry.canonical_url)
        if page is None or not page.ok:
            page = _pseudo_page(entry)
        m_content = content_relevance(page, query_vec)
        m_context = context_relevance(page, context_vec) if context_active else 0.0
        m_engine = engine_confidence(entry, corpus.providers_active, per_provider_limit)
        m_pop = popularity(entry, max_votes)
        final = w[0] * m_content + w[1] * m_context + w[2] * m_engine + w[3] * m_pop
        if debug is not None:
            debug.metrics[entry.canonical_url] = (m_content, m_context, m_engine, m_pop)
        scored.append(
            RankedResult(
                canonical_url=entry.canonical_url,
                title=page.title or entry.best_title,
                rank=0,
                content_relevance=m_content,
                context_relevance=m_context,
                engine_confidence=m_engine,
                popularity=m_pop,
                final_score=final,
                providers=tuple(sorted({hit.provider_id for hit in entry.hits})),
            )
        )

    scored.sort(key=lambda r: (-r.final_score, -r.engine_confidence, r.canonical_url))
    top = scored[:top_n]
    return [
        RankedResult(
            canonical_url=r.canonical_url,
            title=r.title,
            rank=i,
            content_relevance=r.content_relevance,
            context_relevance=r.context_relevance,
            engine_confidence=r.engine_confidence,
            popularity=r.popularity,
            final_score=r.final_score,
            providers=r.providers,
        )
        for i, r in enumerate(top, start=1)
    ]
