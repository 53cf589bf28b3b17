"""Token graph over a stack trace and per-token importance scoring.

Nodes are the trace tokens; edges encode class-method static relations,
method call sequences, and the throw site.  Token importance fuses an
undirected PageRank over that graph with degree of interest (reciprocal
frame depth) and context-code frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import EmptyTokenSet
from .trace import (
    ContextCode,
    StackTrace,
    Token,
    _method_token,
    class_name_parts,
    context_frequency,
    extract_tokens,
)

DEFAULT_DAMPING = 0.85
DEFAULT_EPS = 1e-6
DEFAULT_MAX_ITER = 100

DEFAULT_FUSION_WEIGHTS = (1 / 3, 1 / 3, 1 / 3)


class EdgeTag(Enum):
    STATIC_RELATION = "static"
    CALL_SEQUENCE = "call"
    THROW_SITE = "throw"


@dataclass(frozen=True)
class TokenGraph:
    """Undirected graph over trace tokens; no self-loops, merged edge tags."""

    nodes: tuple[Token, ...]
    edges: dict  # (text_a, text_b) ordered by node position -> frozenset[EdgeTag]

    def index(self) -> dict[str, int]:
        return {t.text: i for i, t in enumerate(self.nodes)}

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {t.text: [] for t in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def degree(self, text: str) -> int:
        return len(self.adjacency()[text])


@dataclass(frozen=True)
class TokenScore:
    """Raw and min-max-normalized metrics plus the fused final score."""

    token: Token
    pagerank_raw: float
    doi_raw: float
    freq_raw: float
    pagerank_n: float
    doi_n: float
    freq_n: float
    final: float


@dataclass(frozen=True)
class PageRankResult:
    """Converged (or last-iterate) scores keyed by token text."""

    scores: dict
    iterations: int
    converged: bool


# ── Graph construction ───────────────────────────────────────────────────────

def build_graph(trace: StackTrace) -> TokenGraph:
    """Token graph for a trace: static relations, call sequence, throw site.

    Inner-class names chain their parts (outer-inner) before linking the
    innermost part to the frame's method.  Duplicate pairs merge their tags;
    self-loops are never created; filtered-out tokens never appear.
    """
    tokens = extract_tokens(trace)
    if not tokens:
        raise EmptyTokenSet("no usable tokens in trace")

    order = {t.text: i for i, t in enumerate(tokens)}
    edges: dict[tuple[str, str], set[EdgeTag]] = {}

    def add_edge(a: str, b: str, tag: EdgeTag) -> None:
        if a == b or a not in order or b not in order:
            return
        key = (a, b) if order[a] < order[b] else (b, a)
        edges.setdefault(key, set()).add(tag)

    for segment in trace.chain():
        exc_parts = [p for p in class_name_parts(segment.exception_type) if p in order]
        for left, right in zip(exc_parts, exc_parts[1:]):
            add_edge(left, right, EdgeTag.STATIC_RELATION)

        methods: list[str | None] = []
        for frame in segment.frames:
            method = _method_token(frame.method)
            methods.append(method if method in order else None)
            parts = [p for p in class_name_parts(frame.class_fq) if p in order]
            for left, right in zip(parts, parts[1:]):
                add_edge(left, right, EdgeTag.STATIC_RELATION)
            if parts and methods[-1]:
                add_edge(parts[-1], methods[-1], EdgeTag.STATIC_RELATION)

        for callee, caller in zip(methods, methods[1:]):
            if callee and caller:
                add_edge(caller, callee, EdgeTag.CALL_SEQUENCE)

        if exc_parts and methods[0]:
            add_edge(exc_parts[-1], methods[0], EdgeTag.THROW_SITE)

    frozen = {pair: frozenset(tags) for pair, tags in edges.items()}
    return TokenGraph(nodes=tuple(tokens), edges=frozen)


# ── PageRank ─────────────────────────────────────────────────────────────────

def pagerank(
    graph: TokenGraph,
    damping: float = DEFAULT_DAMPING,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> PageRankResult:
    """Undirected PageRank: S(v) = (1-d) + d * sum(S(u)/deg(u) for u adj v).

    Starts from S = 1 everywhere and iterates until the largest per-node
    change drops below eps.  Isolated nodes settle at 1-d.  Non-convergence
    within max_iter returns the last iterate with converged=False.
    """
    if not graph.nodes:
        raise EmptyTokenSet("cannot rank an empty graph")
    adj = graph.adjacency()
    deg = {text: len(neigh) for text, neigh in adj.items()}
    scores = {t.text: 1.0 for t in graph.nodes}

    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        new = {}
        for text in scores:
            acc = sum(scores[u] / deg[u] for u in adj[text])
            new[text] = (1.0 - damping) + damping * acc
        delta = max(abs(new[t] - scores[t]) for t in scores)
        scores = new
        if delta < eps:
            converged = True
            break
    return PageRankResult(scores=scores, iterations=iterations, converged=converged)


# ── Metrics and fusion ───────────────────────────────────────────────────────

def degree_of_interest(trace: StackTrace) -> dict[Token, float]:
    """Reciprocal-depth salience: 1 / (1 + min frame depth of the token)."""
    return {t: 1.0 / (1.0 + t.min_depth) for t in extract_tokens(trace)}


def _minmax(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)  # degenerate: metric is neutral, not zeroed
    return [(v - lo) / (hi - lo) for v in values]


def token_scores(
    trace: StackTrace,
    code: ContextCode | None = None,
    weights: tuple[float, float, float] = DEFAULT_FUSION_WEIGHTS,
    *,
    damping: float = DEFAULT_DAMPING,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[TokenScore]:
    """Score every trace token and return them best-first.

    Each raw metric is min-max normalized across the token set, then fused
    with the given weights.  Ties break on (shallower depth, token text).
    """
    w_pr, w_doi, w_f = _check_weights(weights)
    graph = build_graph(trace)
    tokens = list(graph.nodes)

    pr = pagerank(graph, damping=damping, eps=eps, max_iter=max_iter).scores
    pr_raw = [pr[t.text] for t in tokens]
    doi_raw = [1.0 / (1.0 + t.min_depth) for t in tokens]
    if code is None:
        code = ContextCode(source_text="")
    freq_raw = [float(context_frequency(t.text, code)) for t in tokens]

    pr_n, doi_n, freq_n = _minmax(pr_raw), _minmax(doi_raw), _minmax(freq_raw)
    scored = [
        TokenScore(
            token=t,
            pagerank_raw=pr_raw[i],
            doi_raw=doi_raw[i],
            freq_raw=freq_raw[i],
            pagerank_n=pr_n[i],
            doi_n=doi_n[i],
            freq_n=freq_n[i],
            final=w_pr * pr_n[i] + w_doi * doi_n[i] + w_f * freq_n[i],
        )
        for i, t in enumerate(tokens)
    ]
    scored.sort(key=lambda s: (-s.final, s.token.min_depth, s.token.text))
    return scored


def _check_weights(weights) -> tuple[float, float, float]:
    w = tuple(float(x) for x in weights)
    if len(w) != 3 or any(x < 0 for x in w):
        raise ValueError("need three non-negative fusion weights")
    if abs(sum(w) - 1.0) > 1e-6:
        raise ValueError("fusion weights must sum to 1")
    return w


# ── DOT export ───────────────────────────────────────────────────────────────

def export_dot(graph: TokenGraph, scores: list[TokenScore]) -> str:
    """Deterministic DOT text: one node line per token, one line per merged edge."""
    by_text = {s.token.text: s for s in scores}
    missing = [t.text for t in graph.nodes if t.text not in by_text]
    if missing:
        raise ValueError(f"scores missing for nodes: {missing}")

    order = graph.index()
    lines = ["digraph token_graph {", "  rankdir=LR;", '  node [shape=box, style="rounded"];']
    for token in graph.nodes:
        score = by_text[token.text].final
        lines.append(f'  "{token.text}" [label="{token.text}\\n{score:.3f}"];')
    for a, b in sorted(graph.edges, key=lambda pair: (order[pair[0]], order[pair[1]])):
        tags = ",".join(sorted(tag.value for tag in graph.edges[(a, b)]))
        lines.append(f'  "{a}" -> "{b}" [dir=none, label="{tags}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
