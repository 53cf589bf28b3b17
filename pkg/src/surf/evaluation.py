"""Offline evaluation harness: pyramid score plus precision/recall.

Benchmark scenarios are checked-in fixture directories, so the whole
harness runs without network access.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCandidate
from .rank import RankedResult
from .search import canonicalize_url

REPORT_KS = (1, 5, 10, 30)


@dataclass(frozen=True)
class ReferenceQuerySet:
    """Hand-written reference queries for one scenario, tokenized."""

    scenario_id: str
    references: tuple[frozenset, ...]

    def __post_init__(self):
        if not self.references:
            raise ValueError("need at least one reference query")
        if any(not ref for ref in self.references):
            raise ValueError("reference token-sets must be non-empty")

    @classmethod
    def from_lists(cls, scenario_id: str, references) -> "ReferenceQuerySet":
        normalized = tuple(
            frozenset(token.lower() for token in ref) for ref in references
        )
        return cls(scenario_id=scenario_id, references=normalized)


@dataclass
class LabeledScenario:
    """One benchmark case: a failure, its fixtures, and relevance labels."""

    scenario_id: str
    trace_text: str
    context_code: str
    references: ReferenceQuerySet
    relevant_urls: frozenset
    fixtures_dir: Path
    pages_path: Path | None = None

    def __post_init__(self):
        if not self.relevant_urls:
            raise ValueError("scenario needs at least one relevant URL")


@dataclass
class ScenarioReport:
    scenario_id: str
    query_text: str
    pyramid: float
    precision: dict[int, float] = field(default_factory=dict)
    recall: dict[int, float] = field(default_factory=dict)
    corpus_size: int = 0
    elapsed_s: float = 0.0
    results: list[RankedResult] = field(default_factory=list)


def pyramid_score(candidate, refs: ReferenceQuerySet) -> float:
    """Overlap of a candidate token-set with the references, normalized by
    the best same-size token-set.

    w(t) counts the references containing t (case-insensitive).  The
    denominator takes the |candidate| largest positive weights, padding
    with zeros when fewer positive-weight tokens exist.
    """
    tokens = {str(t).lower() for t in candidate}
    if not tokens:
        raise EmptyCandidate("candidate token-set is empty")

    weights: dict[str, int] = {}
    for ref in refs.references:
        for token in ref:
            weights[token] = weights.get(token, 0) + 1

    numerator = sum(weights.get(token, 0) for token in tokens)
    best = sorted(weights.values(), reverse=True)[: len(tokens)]
    denominator = sum(best)
    if denominator == 0:
        return 0.0
    return numerator / denominator


def precision_recall_at_k(ranked_urls, relevant_urls, k: int) -> tuple[float, float]:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant_urls:
        raise ValueError("relevant set must be non-empty")
    top = list(ranked_urls)[:k]
    hits = sum(1 for url in top if url in relevant_urls)
    return hits / k, hits / len(relevant_urls)


def evaluate_ranking(
    scenario: LabeledScenario, results: list[RankedResult], k: int
) -> tuple[float, float]:
    urls = [r.canonical_url for r in results]
    return precision_recall_at_k(urls, scenario.relevant_urls, k)


def load_scenario(path: str | Path) -> LabeledScenario:
    """Read one scenario directory.

    Layout: trace.txt, context.java (optional), references.json (list of
    token lists), relevant_urls.json (list of URLs), providers/<id>/*.json
    fixture responses, and optional pages.json ({url: html}).
    """
    root = Path(path)
    scenario_id = root.name
    trace_text = (root / "trace.txt").read_text(encoding="utf-8")

    context_path = root / "context.java"
    context_code = context_path.read_text(encoding="utf-8") if context_path.is_file() else ""

    raw_refs = json.loads((root / "references.json").read_text(encoding="utf-8"))
    if isinstance(raw_refs, dict):
        raw_refs = raw_refs["references"]
    references = ReferenceQuerySet.from_lists(scenario_id, raw_refs)

    raw_urls = json.loads((root / "relevant_urls.json").read_text(encoding="utf-8"))
    relevant = frozenset(canonicalize_url(url) for url in raw_urls)

    pages_path = root / "pages.json"
    return LabeledScenario(
        scenario_id=scenario_id,
        trace_text=trace_text,
        context_code=context_code,
        references=references,
        relevant_urls=relevant,
        fixtures_dir=root / "providers",
        pages_path=pages_path if pages_path.is_file() else None,
    )


def discover_scenarios(root: str | Path) -> list[LabeledScenario]:
    base = Path(root)
    return [
        load_scenario(sub)
        for sub in sorted(p for p in base.iterdir() if p.is_dir())
        if (sub / "trace.txt").is_file()
    ]


def run_scenario(
    scenario: LabeledScenario,
    *,
    weights: tuple[float, float, float, float] | None = None,
    associate_context: bool = True,
    ks=REPORT_KS,
) -> ScenarioReport:
    """Run the full pipeline on one scenario's fixtures and measure it.

    The pyramid score is computed over the tokens of the top recommended
    query, matching how a user would take the first suggestion.
    """
    from .content import FixturePageSource
    from .pipeline import execute_search, recommend_queries
    from .rank import DEFAULT_RANK_WEIGHTS
    from .search import providers_from_fixtures

    start = time.monotonic()
    recommendation = recommend_queries(scenario.trace_text, scenario.context_code)
    top_query = recommendation.queries[0]
    pyramid = pyramid_score(top_query.tokens, scenario.references)

    providers = providers_from_fixtures(scenario.fixtures_dir)
    if scenario.pages_path is not None:
        page_source = FixturePageSource.from_json_file(scenario.pages_path)
    else:
        page_source = None

    outcome = execute_search(
        top_query,
        providers,
        trace=recommendation.trace,
        context_code=recommendation.context_code,
        associate_context=associate_context,
        weights=weights or DEFAULT_RANK_WEIGHTS,
        page_source=page_source,
    )

    report = ScenarioReport(
        scenario_id=scenario.scenario_id,
        query_text=top_query.text,
        pyramid=pyramid,
        corpus_size=len(outcome.corpus),
        results=outcome.results,
    )
    for k in ks:
        p, r = evaluate_ranking(scenario, outcome.results, k)
        report.precision[k] = p
        report.recall[k] = r
    report.elapsed_s = time.monotonic() - start
    return report


def report_rows(reports: list[ScenarioReport], ks=REPORT_KS) -> list[list]:
    """Header plus one row per scenario with pyramid and precision/recall."""
    header = ["scenario_id", "query", "pyramid", "corpus_size"]
    for k in ks:
        header += [f"precision@{k}", f"recall@{k}"]
    rows: list[list] = [header]
    for report in reports:
        row = [
            report.scenario_id,
            report.query_text,
            f"{report.pyramid:.4f}",
            report.corpus_size,
        ]
        for k in ks:
            row += [f"{report.precision.get(k, 0.0):.4f}", f"{report.recall.get(k, 0.0):.4f}"]
        rows.append(row)
    return rows


def write_report(reports: list[ScenarioReport], dest, ks=REPORT_KS) -> None:
    """Write the CSV report to a path or an open text file."""
    rows = report_rows(reports, ks)
    if hasattr(dest, "write"):
        csv.writer(dest).writerows(rows)
        return
    with open(dest, "w", encoding="utf-8", newline="") as handle:
        csv.writer(handle).writerows(rows)
