"""Search-query formulation and ranking from scored tokens."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import EmptyTokenSet
from .graph import TokenScore

DEFAULT_K_TOKENS = 5
DEFAULT_COMBO = 3
DEFAULT_TOP_QUERIES = 5
MAX_COMPLETIONS = 10


@dataclass(frozen=True)
class Query:
    """One recommended query: ordered tokens, composed text, mean token score."""

    tokens: tuple[str, ...]
    text: str
    score: float
    rank: int = 0

    @staticmethod
    def from_tokens(tokens, score: float, rank: int = 0) -> "Query":
        ordered = _dedupe(tokens)
        return Query(tokens=ordered, text=" ".join(ordered), score=score, rank=rank)

    @staticmethod
    def keyword(text: str) -> "Query":
        """Free-typed keyword query; carries no token scores."""
        return Query.from_tokens(text.split(), score=0.0, rank=0)


def _dedupe(tokens) -> tuple[str, ...]:
    seen: set[str] = set()
    out: list[str] = []
    for tok in tokens:
        key = tok.lower()
        if key not in seen:
            seen.add(key)
            out.append(tok)
    return tuple(out)


def _canonical(scores: list[TokenScore]) -> list[TokenScore]:
    # Re-sort defensively so permuting the input cannot change the output.
    return sorted(scores, key=lambda s: (-s.final, s.token.min_depth, s.token.text))


def formulate_queries(
    scores: list[TokenScore],
    exception_simple_name: str,
    k_tokens: int = DEFAULT_K_TOKENS,
    combo: int = DEFAULT_COMBO,
    top_q: int = DEFAULT_TOP_QUERIES,
) -> list[Query]:
    """Combine the top-scored tokens into ranked candidate queries.

    Takes the best k_tokens tokens, enumerates every combination of size
    combo, prepends the exception simple name to combinations that lack it,
    and scores each query by the mean of its constituent token scores.
    Returns the top_q best, ranked 1-based.
    """
    if not scores:
        raise EmptyTokenSet("cannot formulate queries without tokens")
    if combo < 1 or k_tokens < combo:
        raise ValueError("need k_tokens >= combo >= 1")

    ordered = _canonical(scores)
    top = ordered[:k_tokens]
    final_by_text = {s.token.text: s.final for s in ordered}
    exc_score = final_by_text.get(exception_simple_name, max(final_by_text.values()))

    if len(top) < combo:
        groups = [tuple(top)]  # degenerate fallback: one query of all tokens
    else:
        groups = list(combinations(top, combo))

    candidates = []
    for group in groups:
        texts = [s.token.text for s in group]
        values = [s.final for s in group]
        if exception_simple_name.lower() not in (t.lower() for t in texts):
            texts = [exception_simple_name] + texts
            values = [exc_score] + values
        candidates.append(Query.from_tokens(texts, score=sum(values) / len(values)))

    candidates.sort(key=lambda q: (-q.score, q.text))
    return [
        Query(tokens=q.tokens, text=q.text, score=q.score, rank=i + 1)
        for i, q in enumerate(candidates[:top_q])
    ]


def complete_query(prefix: str, scores: list[TokenScore]) -> list[str]:
    """Token completions for a prefix, best score first, at most ten."""
    needle = prefix.lower()
    return [
        s.token.text
        for s in _canonical(scores)
        if s.token.text.lower().startswith(needle)
    ][:MAX_COMPLETIONS]
