"""Command line front end: queries, search, watch, serve, eval."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import DEFAULT_LISTEN, load_settings, parse_listen
from .errors import SurfError
from .evaluation import discover_scenarios, run_scenario, write_report
from .pipeline import execute_search, recommend_queries
from .search import providers_from_fixtures

USAGE_EXIT = 1
PIPELINE_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _parse_weights(raw: str, n: int, flag: str):
    parts = [p for p in raw.replace(",", " ").split() if p]
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise SystemExit(_usage(f"{flag} expects numbers, got {raw!r}"))
    if len(values) != n:
        raise SystemExit(_usage(f"{flag} expects {n} values, got {len(values)}"))
    return values


def _usage(message: str) -> int:
    print(f"surf: error: {message}", file=sys.stderr)
    return USAGE_EXIT


def build_parser() -> _Parser:
    parser = _Parser(prog="surf", description="Context-aware search for stack traces.")
    parser.add_argument("--config", help="settings file (TOML); default $SURF_CONFIG")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_queries = sub.add_parser(
        "queries", parents=[], help="recommend search queries for a stack trace"
    )
    p_queries.add_argument("--trace-file", required=True, help="trace text file, - for stdin")
    p_queries.add_argument("--code-file", help="context source file")
    p_queries.add_argument("--dot", help="write the token graph as DOT to this path")
    p_queries.add_argument("--damping", type=float, default=None, help="PageRank damping factor")
    p_queries.add_argument("--weights", help="token fusion weights: pagerank,doi,frequency")
    p_queries.add_argument("--json", action="store_true", help="JSON output")
    p_queries.add_argument("--table", action="store_true", help="table output (default)")

    p_search = sub.add_parser("search", help="run a search and rank the results")
    p_search.add_argument("query", nargs="?", help="keyword query (optional with --trace-file)")
    p_search.add_argument("--trace-file", help="trace text file, - for stdin")
    p_search.add_argument("--code-file", help="context source file")
    p_search.add_argument(
        "--no-context", action="store_true", help="keyword matching only (no context metrics)"
    )
    p_search.add_argument("--rank-weights", help="four weights: content,context,engine,popularity")
    p_search.add_argument("--fixtures-dir", help="replay provider fixtures from this directory")
    p_search.add_argument("--pages-file", help="JSON {url: html} used instead of live fetches")
    p_search.add_argument("--top", type=int, default=None, help="result count (default 30)")
    p_search.add_argument("--json", action="store_true", help="JSON output")
    p_search.add_argument("--table", action="store_true", help="table output (default)")

    p_watch = sub.add_parser("watch", help="monitor a stream for stack traces")
    p_watch.add_argument("source", nargs="?", default="-", help="file to tail, - for stdin")
    p_watch.add_argument("--from-start", action="store_true", help="scan existing file content")
    p_watch.add_argument(
        "--debounce", type=float, default=10.0, help="suppress duplicate traces (seconds)"
    )
    p_watch.add_argument(
        "--auto-search", action="store_true", help="run the search pipeline on each event"
    )
    p_watch.add_argument("--fixtures-dir", help="provider fixtures for --auto-search")
    p_watch.add_argument("--pages-file", help="page fixtures for --auto-search")
    p_watch.add_argument("--json", action="store_true", help="one JSON object per event")

    p_serve = sub.add_parser("serve", help="run the HTTP JSON service")
    p_serve.add_argument("--listen", default=None, help=f"host:port (default {DEFAULT_LISTEN})")
    p_serve.add_argument("--fixtures-dir", help="serve from provider fixtures")
    p_serve.add_argument("--pages-file", help="page fixtures instead of live fetches")
    p_serve.add_argument("--ui-dir", help="static web UI directory to mount at /")

    p_eval = sub.add_parser("eval", help="run the benchmark scenarios and report")
    p_eval.add_argument("--fixtures-dir", required=True, help="directory of scenario fixtures")
    p_eval.add_argument("--out", default="-", help="CSV report path, - for stdout")
    p_eval.add_argument("--rank-weights", help="four weights: content,context,engine,popularity")
    p_eval.add_argument("--no-context", action="store_true", help="rank without context metrics")

    return parser


def _cmd_queries(args, settings) -> int:
    trace_text = _read_text(args.trace_file)
    code_text = _read_text(args.code_file) if args.code_file else ""
    fusion = settings.fusion_weights
    if args.weights:
        fusion = _parse_weights(args.weights, 3, "--weights")
    rec = recommend_queries(
        trace_text,
        code_text,
        fusion_weights=fusion,
        damping=args.damping if args.damping is not None else settings.damping,
        eps=settings.eps,
        max_iter=settings.max_iter,
    )
    if args.dot:
        Path(args.dot).write_text(rec.graph_dot, encoding="utf-8")
    if args.json:
        payload = {
            "queries": [
                {"text": q.text, "score": round(q.score, 6), "tokens": list(q.tokens)}
                for q in rec.queries
            ],
            "graph_dot": rec.graph_dot,
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"{'#':>2}  {'score':>8}  query")
        for q in rec.queries:
            print(f"{q.rank:>2}  {q.score:>8.4f}  {q.text}")
    return 0


def _providers_for(args, settings):
    fixtures_dir = getattr(args, "fixtures_dir", None)
    if fixtures_dir:
        return providers_from_fixtures(fixtures_dir, limit=settings.per_provider_limit)
    from .service import build_providers

    providers = build_providers(settings)
    if not providers:
        raise SurfError("no search providers configured")
    return providers


def _page_source_for(args, settings):
    pages_file = getattr(args, "pages_file", None)
    if pages_file:
        from .content import FixturePageSource

        return FixturePageSource.from_json_file(pages_file)
    if getattr(args, "fixtures_dir", None):
        # Fixture runs stay offline: rank from titles and snippets.
        return None
    from .content import HttpPageSource, PageCache

    cache = PageCache(settings.cache_dir) if settings.cache_dir else None
    return HttpPageSource(cache=cache)


def _cmd_search(args, settings) -> int:
    if not args.query and not args.trace_file:
        return _usage("search needs a query or --trace-file")

    weights = settings.rank_weights
    if args.rank_weights:
        weights = _parse_weights(args.rank_weights, 4, "--rank-weights")

    trace = None
    context_code = None
    query = None
    if args.trace_file:
        rec = recommend_queries(
            _read_text(args.trace_file),
            _read_text(args.code_file) if args.code_file else "",
            fusion_weights=settings.fusion_weights,
            damping=settings.damping,
            eps=settings.eps,
            max_iter=settings.max_iter,
        )
        trace = rec.trace
        context_code = rec.context_code
        query = rec.queries[0]
    if args.query:
        from .query import Query

        query = Query.keyword(args.query)

    outcome = execute_search(
        query,
        _providers_for(args, settings),
        trace=trace,
        context_code=context_code,
        associate_context=not args.no_context,
        weights=weights,
        top_n=args.top or settings.top_results,
        corpus_cap=settings.corpus_cap,
        page_source=_page_source_for(args, settings),
    )

    if args.json:
        print(json.dumps(outcome.to_dict(), indent=2))
    else:
        for warning in outcome.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        print(f"{'#':>2}  {'final':>6}  {'cont':>5} {'ctx':>5} {'conf':>5} {'pop':>5}  title / url")
        for r in outcome.results:
            print(
                f"{r.rank:>2}  {r.final_score:>6.3f}  "
                f"{r.content_relevance:>5.3f} {r.context_relevance:>5.3f} "
                f"{r.engine_confidence:>5.3f} {r.popularity:>5.3f}  {r.title}"
            )
            print(f"{'':>2}  {'':>6}  {r.canonical_url}")
    return 0


def _cmd_watch(args, settings) -> int:
    from .watch import follow_file, watch_stdin

    if args.source == "-":
        events = watch_stdin(debounce_s=args.debounce)
    else:
        events = follow_file(
            args.source, from_start=args.from_start, debounce_s=args.debounce
        )

    providers = None
    try:
        for event in events:
            if args.json:
                print(json.dumps(event.to_dict()), flush=True)
            else:
                print(
                    f"[{event.source_id}] {event.trace.exception_type} -> {event.query.text}",
                    flush=True,
                )
            if args.auto_search:
                if providers is None:
                    providers = _providers_for(args, settings)
                outcome = execute_search(
                    event.query,
                    providers,
                    trace=event.trace,
                    weights=settings.rank_weights,
                    top_n=settings.top_results,
                    corpus_cap=settings.corpus_cap,
                    page_source=_page_source_for(args, settings),
                )
                for r in outcome.results[:5]:
                    print(f"    {r.rank}. [{r.final_score:.3f}] {r.canonical_url}", flush=True)
    except KeyboardInterrupt:
        pass
    return 0


def _cmd_serve(args, settings) -> int:
    from .service import create_app, serve

    if args.fixtures_dir:
        settings.fixtures_dir = args.fixtures_dir
        settings.providers = []
    page_source = _page_source_for(args, settings)
    app = create_app(settings=settings, page_source=page_source, ui_dir=args.ui_dir)
    host, port = parse_listen(args.listen or settings.listen)
    serve(app, host, port)
    return 0


def _cmd_eval(args, settings) -> int:
    scenarios = discover_scenarios(args.fixtures_dir)
    if not scenarios:
        return _usage(f"no scenarios under {args.fixtures_dir}")
    weights = settings.rank_weights
    if args.rank_weights:
        weights = _parse_weights(args.rank_weights, 4, "--rank-weights")
    reports = [
        run_scenario(s, weights=weights, associate_context=not args.no_context)
        for s in scenarios
    ]
    if args.out == "-":
        write_report(reports, sys.stdout)
    else:
        write_report(reports, args.out)
        print(f"wrote {args.out} ({len(reports)} scenarios)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return USAGE_EXIT

    try:
        settings = load_settings(args.config)
    except (OSError, ValueError) as exc:
        return _usage(f"cannot load config: {exc}")

    handlers = {
        "queries": _cmd_queries,
        "search": _cmd_search,
        "watch": _cmd_watch,
        "serve": _cmd_serve,
        "eval": _cmd_eval,
    }
    try:
        return handlers[args.command](args, settings)
    except FileNotFoundError as exc:
        return _usage(f"cannot read {exc.filename}")
    except SurfError as exc:
        print(f"surf: {exc}", file=sys.stderr)
        return PIPELINE_EXIT


if __name__ == "__main__":
    sys.exit(main())
