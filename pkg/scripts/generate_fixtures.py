#!/usr/bin/env python3
"""Construct and freeze the benchmark scenario fixtures.

Builds two scenarios under fixtures/scenarios/, each with four providers
x 30 hits, page HTML, reference queries, and relevance labels.  Before
writing anything it runs the full pipeline against the candidate fixtures
and asserts the properties the test suite relies on:

  * post-dedup corpus size within [100, 120]
  * scenario cme-arraylist: the three pages embedding the stack trace in
    <pre> blocks hold exactly the top 3 ranks with context association on,
    and not all of them stay in the top 3 with it off
  * ranked JSON is byte-identical across two runs
  * the whole pipeline finishes well under the 5 s budget

Run from the repository root:  python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import html
import json
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from surf.content import FixturePageSource
from surf.pipeline import execute_search, recommend_queries
from surf.search import canonicalize_url, providers_from_fixtures

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "scenarios"

CME_TRACE = (
    'Exception in thread "main" java.util.ConcurrentModificationException\n'
    "\tat java.util.ArrayList$Itr.checkForComodification(Unknown Source)\n"
    "\tat java.util.ArrayList$Itr.next(Unknown Source)\n"
    "\tat core.MyListManager.main(MyListManager.java:28)\n"
)

CME_CODE = """\
List<String> myList = new ArrayList<String>();
String[] items={"apple","orange","banana",
               "mango","grape"};
for(String item:items){
    myList.add(item);  }
//deleting a particular item from the list
Iterator<String> it = myList.iterator();
while(it.hasNext()){
   String value = it.next();
    if(value.equals("banana"))
     myList.remove(value);  }
"""

NPE_TRACE = (
    'Exception in thread "main" java.lang.RuntimeException: Failed to load user profile\n'
    "\tat app.ProfileService.loadProfile(ProfileService.java:42)\n"
    "\tat app.Main.main(Main.java:13)\n"
    "Caused by: java.lang.NullPointerException\n"
    "\tat app.UserRepository.findById(UserRepository.java:27)\n"
    "\tat app.ProfileService.loadProfile(ProfileService.java:40)\n"
    "\t... 1 more\n"
)

NPE_CODE = """\
public Profile loadProfile(String userId) {
    User user = userRepository.findById(userId);
    return new Profile(user.getName(), user.getEmail());
}
"""

VOCAB = (
    "java exception error thread stack trace debug tutorial guide spring "
    "collection map hash loop stream lambda method class static void string "
    "integer print console output input file read write parse json xml http "
    "client server request response test junit mock build maven gradle deploy"
).split()


def page_html(title: str, body: str, code_blocks=(), with_noise: bool = False) -> str:
    parts = [f"<html><head><title>{html.escape(title)}</title>"]
    if with_noise:
        parts.append("<script>var tracker = 'ignore me';</script>")
        parts.append("<style>.q { color: red }</style>")
    parts.append(f"</head><body><h1>{html.escape(title)}</h1>")
    parts.append(f"<p>{html.escape(body)}</p>")
    for block in code_blocks:
        parts.append(f"<pre>{html.escape(block)}</pre>")
    parts.append("</body></html>")
    return "".join(parts)


def filler_text(rng: random.Random, n: int, extra=()) -> str:
    words = [rng.choice(VOCAB) for _ in range(n)]
    words.extend(extra)
    rng.shuffle(words)
    return " ".join(words)


def build_cme(rng: random.Random) -> dict:
    """Provider hit lists, pages, and labels for the main scenario."""
    so, google, bing, yahoo = [], [], [], []
    pages: dict[str, str] = {}
    relevant: list[str] = []

    def so_hit(rank, url, title, snippet, votes, answers=3):
        so.append(
            {
                "url": url,
                "title": title,
                "snippet": snippet,
                "rank": rank,
                "meta": {"score": votes, "answer_count": answers, "is_answered": True},
            }
        )

    def web_hit(bucket, rank, url, title, snippet):
        bucket.append({"url": url, "title": title, "snippet": snippet, "rank": rank})

    trace_keywords = "ConcurrentModificationException ArrayList Itr checkForComodification"

    # Three pages that embed the trace itself: these must win with context on.
    specials = [
        (
            "https://stackoverflow.com/questions/8104692/concurrentmodificationexception-removing-from-arraylist",
            "ConcurrentModificationException ArrayList Itr checkForComodification while removing",
            2,
            72,
            "google",
            8,
        ),
        (
            "https://stackoverflow.com/questions/223918/iterating-and-removing-from-arraylist",
            "ArrayList Itr checkForComodification ConcurrentModificationException on remove",
            3,
            68,
            "bing",
            11,
        ),
        (
            "https://stackoverflow.com/questions/1496180/arraylist-itr-checkforcomodification-explained",
            "Why ArrayList Itr checkForComodification throws ConcurrentModificationException",
            4,
            65,
            "yahoo",
            18,
        ),
    ]
    for url, title, so_rank, votes, other, other_rank in specials:
        snippet = "Iterator next checkForComodification throws when the list is modified"
        so_hit(so_rank, url, title, snippet, votes)
        bucket = {"google": google, "bing": bing, "yahoo": yahoo}[other]
        web_hit(bucket, other_rank, url + "?utm_source=serp&utm_medium=web", title, snippet)
        # Body says little; the <pre> trace and code snippet carry the signal.
        pages[url] = page_html(
            title,
            "A question about java collections. "
            + filler_text(rng, 14, extra=["iterator", "remove"]),
            code_blocks=[CME_TRACE, CME_CODE],
            with_noise=True,
        )
        relevant.append(url)

    # Three strong pages without any code: they take over with context off.
    competitors = [
        (
            "https://javabulletin.example.com/concurrentmodificationexception-guide",
            "Java ConcurrentModificationException ArrayList Itr checkForComodification guide",
        ),
        (
            "https://codefaq.example.org/arraylist-concurrentmodificationexception",
            "ArrayList Itr checkForComodification ConcurrentModificationException explained",
        ),
        (
            "https://devnotes.example.net/java-util-concurrentmodificationexception",
            "Fix java util ConcurrentModificationException ArrayList Itr checkForComodification",
        ),
    ]
    for i, (url, title) in enumerate(competitors):
        snippet = f"{trace_keywords} tutorial with screenshots"
        web_hit(google, i + 1, url, title, snippet)
        web_hit(bing, i + 8, url + "#ref", title, snippet)
        web_hit(yahoo, i * 2 + 13, url + "?utm_campaign=search", title, snippet)
        pages[url] = page_html(
            title,
            f"{trace_keywords} how to fix the exception in java "
            + filler_text(rng, 24),
        )

    # Remaining StackOverflow rows: plausible Q&A, moderate votes, a vote anchor.
    so_rank = 1
    so_urls = []
    while len(so) < 30:
        while any(h["rank"] == so_rank for h in so):
            so_rank += 1
        qid = 3000000 + len(so_urls) * 517 + so_rank
        url = f"https://stackoverflow.com/questions/{qid}/java-question-{qid}"
        so_urls.append(url)
        votes = 200 if so_rank == 9 else rng.randint(5, 110)
        title = filler_text(rng, 5, extra=["java", "ConcurrentModificationException"]).title()
        snippet = filler_text(rng, 12, extra=["ArrayList", "iterator"])
        so_hit(so_rank, url, title, snippet, votes, answers=rng.randint(1, 6))
        if rng.random() < 0.5:
            pages[url] = page_html(
                title,
                snippet + " " + filler_text(rng, 20),
                code_blocks=[filler_text(rng, 8, extra=["public", "static", "void"])],
            )

    # Two of those SO urls also show up in google (same page, tracked url).
    for offset, row in enumerate(so_urls[:2]):
        web_hit(google, 17 + offset, row + "?utm_source=g", "Stack Overflow result", "java q&a")
    # And one more SO url appears in bing.
    web_hit(bing, 19, so_urls[2] + "#answers", "Stack Overflow result", "java q&a")

    # Cross-engine duplicate pool: same blog posts listed by two engines each.
    shared = []
    for i in range(6):
        url = f"https://javadigest.example.com/posts/{2400 + i}-collection-pitfalls"
        title = filler_text(rng, 4, extra=["ConcurrentModificationException"]).title()
        shared.append((url, title))
        pages[url] = page_html(title, filler_text(rng, 24, extra=["java", "list"]))
    web_hit(google, 9, shared[0][0], shared[0][1], "collection pitfalls")
    web_hit(bing, 12, shared[0][0] + "/", shared[0][1], "collection pitfalls")
    web_hit(google, 11, shared[1][0], shared[1][1], "more pitfalls")
    web_hit(bing, 14, shared[1][0] + "?fbclid=xyz", shared[1][1], "more pitfalls")
    web_hit(bing, 16, shared[2][0], shared[2][1], "iterator rules")
    web_hit(yahoo, 10, shared[2][0] + "/", shared[2][1], "iterator rules")
    web_hit(bing, 18, shared[3][0], shared[3][1], "fail fast lists")
    web_hit(yahoo, 12, shared[3][0] + "#top", shared[3][1], "fail fast lists")
    web_hit(google, 13, shared[4][0], shared[4][1], "modification guards")
    web_hit(yahoo, 14, shared[4][0] + "?gclid=123", shared[4][1], "modification guards")
    web_hit(google, 15, shared[5][0], shared[5][1], "concurrent collections")
    web_hit(yahoo, 16, shared[5][0] + "/", shared[5][1], "concurrent collections")

    # Fill every engine to exactly 30 rows with unique pages.
    hosts = {
        "google": "https://javahints.example.com/articles",
        "bing": "https://bugarchive.example.org/threads",
        "yahoo": "https://oldforum.example.net/topics",
    }
    for name, bucket in (("google", google), ("bing", bing), ("yahoo", yahoo)):
        seq = 0
        while len(bucket) < 30:
            rank = 1
            used = {h["rank"] for h in bucket}
            while rank in used:
                rank += 1
            seq += 1
            url = f"{hosts[name]}/{name}-{seq:03d}"
            extra = ["ConcurrentModificationException"] if rng.random() < 0.4 else ["java"]
            title = filler_text(rng, 5, extra=extra).title()
            snippet = filler_text(rng, 14, extra=["exception"])
            web_hit(bucket, rank, url, title, snippet)
            if rng.random() < 0.35:
                code = filler_text(rng, 9, extra=["for", "item", "println"])
                pages[url] = page_html(title, snippet + " " + filler_text(rng, 16), [code])
            elif rng.random() < 0.5:
                pages[url] = page_html(title, snippet + " " + filler_text(rng, 22))

    # A handful of extra relevant labels beyond the three trace pages.
    relevant.append(competitors[0][0])
    relevant.append(competitors[1][0])
    relevant.append(shared[0][0])
    relevant.append(so_urls[0])

    for bucket in (so, google, bing, yahoo):
        bucket.sort(key=lambda h: h["rank"])
        assert len(bucket) == 30, len(bucket)
        assert len({h["rank"] for h in bucket}) == 30

    references = [
        ["concurrentmodificationexception", "arraylist", "iterator"],
        ["java", "concurrentmodificationexception", "remove"],
        ["concurrentmodificationexception", "while", "iterating", "list"],
        ["arraylist", "iterator", "remove", "exception"],
    ]

    return {
        "scenario_id": "cme-arraylist",
        "trace": CME_TRACE,
        "code": CME_CODE,
        "providers": {"stackoverflow": so, "google": google, "bing": bing, "yahoo": yahoo},
        "pages": pages,
        "relevant": relevant,
        "references": references,
        "specials": [u for u, *_ in specials],
    }


def build_npe(rng: random.Random) -> dict:
    """Second scenario: cause-chain trace, lighter overlap plan."""
    so, google, bing, yahoo = [], [], [], []
    pages: dict[str, str] = {}
    relevant: list[str] = []

    def so_hit(rank, url, title, snippet, votes):
        so.append(
            {
                "url": url,
                "title": title,
                "snippet": snippet,
                "rank": rank,
                "meta": {"score": votes, "answer_count": rng.randint(1, 5), "is_answered": True},
            }
        )

    def web_hit(bucket, rank, url, title, snippet):
        bucket.append({"url": url, "title": title, "snippet": snippet, "rank": rank})

    best = "https://stackoverflow.com/questions/218384/what-is-a-nullpointerexception"
    so_hit(1, best, "What is a NullPointerException, and how do I fix it?",
           "NullPointerException thrown when a reference is null", 190)
    pages[best] = page_html(
        "What is a NullPointerException, and how do I fix it?",
        "The null reference explained for java beginners "
        + filler_text(rng, 18, extra=["profile", "repository"]),
        code_blocks=[NPE_TRACE, NPE_CODE],
    )
    relevant.append(best)
    web_hit(google, 1, best + "?utm_source=serp", "What is a NullPointerException", "null ref")

    for bucket, host in (
        (so, "https://stackoverflow.com/questions"),
        (google, "https://javahints.example.com/articles"),
        (bing, "https://bugarchive.example.org/threads"),
        (yahoo, "https://oldforum.example.net/topics"),
    ):
        seq = 0
        while len(bucket) < 30:
            rank = 1
            used = {h["rank"] for h in bucket}
            while rank in used:
                rank += 1
            seq += 1
            extra = ["NullPointerException"] if rng.random() < 0.5 else ["java", "null"]
            title = filler_text(rng, 5, extra=extra).title()
            snippet = filler_text(rng, 12, extra=["findById", "profile"])
            if bucket is so:
                qid = 4100000 + seq * 631
                url = f"{host}/{qid}/npe-question-{qid}"
                so_hit(rank, url, title, snippet, rng.randint(3, 150))
            else:
                url = f"{host}/npe-{seq:03d}"
                web_hit(bucket, rank, url, title, snippet)
            if rng.random() < 0.4:
                pages[url] = page_html(
                    title,
                    snippet + " " + filler_text(rng, 18),
                    code_blocks=[filler_text(rng, 7, extra=["user", "null", "return"])],
                )

    # Nine cross-engine duplicates keep this corpus inside the band too.
    dup_targets = [(google, bing), (google, yahoo), (bing, yahoo)] * 3
    for i, (first, second) in enumerate(dup_targets):
        url = f"https://nullguides.example.com/lessons/{900 + i}"
        title = filler_text(rng, 4, extra=["NullPointerException"]).title()
        pages[url] = page_html(title, filler_text(rng, 20, extra=["null", "check"]))
        rank_a = 20 + (i % 6)
        rank_b = 21 + ((i + 2) % 6)
        first[rank_a - 1] = {"url": url, "title": title, "snippet": "null guide", "rank": rank_a}
        second[rank_b - 1] = {"url": url + "/", "title": title, "snippet": "null guide", "rank": rank_b}
        if i < 2:
            relevant.append(url)

    for bucket in (so, google, bing, yahoo):
        bucket.sort(key=lambda h: h["rank"])
        assert len(bucket) == 30
        assert len({h["rank"] for h in bucket}) == 30

    references = [
        ["nullpointerexception", "java", "null"],
        ["nullpointerexception", "findbyid", "repository"],
        ["java", "nullpointerexception", "fix"],
    ]

    return {
        "scenario_id": "npe-profile",
        "trace": NPE_TRACE,
        "code": NPE_CODE,
        "providers": {"stackoverflow": so, "google": google, "bing": bing, "yahoo": yahoo},
        "pages": pages,
        "relevant": relevant,
        "references": references,
        "specials": [],
    }


def run_pipeline(scenario: dict, associate_context: bool):
    providers_dir = OUT / scenario["scenario_id"] / "providers"
    providers = providers_from_fixtures(providers_dir)
    page_source = FixturePageSource(scenario["pages"])
    rec = recommend_queries(scenario["trace"], scenario["code"])
    outcome = execute_search(
        rec.queries[0],
        providers,
        trace=rec.trace,
        context_code=rec.context_code,
        associate_context=associate_context,
        page_source=page_source,
    )
    return rec, outcome


def write_scenario(scenario: dict) -> None:
    base = OUT / scenario["scenario_id"]
    (base / "providers").mkdir(parents=True, exist_ok=True)
    (base / "trace.txt").write_text(scenario["trace"], encoding="utf-8")
    (base / "context.java").write_text(scenario["code"], encoding="utf-8")
    (base / "references.json").write_text(
        json.dumps(scenario["references"], indent=2) + "\n", encoding="utf-8"
    )
    (base / "relevant_urls.json").write_text(
        json.dumps(scenario["relevant"], indent=2) + "\n", encoding="utf-8"
    )
    (base / "pages.json").write_text(
        json.dumps(scenario["pages"], indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for provider_id, hits in scenario["providers"].items():
        pdir = base / "providers" / provider_id
        pdir.mkdir(parents=True, exist_ok=True)
        (pdir / "default.json").write_text(
            json.dumps({"hits": hits}, indent=2) + "\n", encoding="utf-8"
        )


def verify_and_freeze(scenario: dict) -> None:
    sid = scenario["scenario_id"]
    started = time.monotonic()
    rec, on = run_pipeline(scenario, associate_context=True)
    elapsed = time.monotonic() - started
    _, off = run_pipeline(scenario, associate_context=False)
    _, on_again = run_pipeline(scenario, associate_context=True)

    assert 100 <= len(on.corpus) <= 120, f"{sid}: corpus {len(on.corpus)} outside band"
    assert len(on.results) == 30, f"{sid}: expected top-30, got {len(on.results)}"
    assert elapsed < 5.0, f"{sid}: pipeline took {elapsed:.2f}s"

    bytes_a = json.dumps(on.to_dict(), sort_keys=True).encode()
    bytes_b = json.dumps(on_again.to_dict(), sort_keys=True).encode()
    assert bytes_a == bytes_b, f"{sid}: ranked JSON not byte-stable"

    if scenario["specials"]:
        specials = {canonicalize_url(u) for u in scenario["specials"]}
        top3_on = {r.canonical_url for r in on.results[:3]}
        top3_off = {r.canonical_url for r in off.results[:3]}
        assert top3_on == specials, (
            f"{sid}: context-on top3 {sorted(top3_on)} != specials {sorted(specials)}"
        )
        assert not specials.issubset(top3_off), f"{sid}: context-off top3 unchanged"
        margin = on.results[2].final_score - on.results[3].final_score
        print(f"  {sid}: top-3 margin with context on = {margin:.4f}")

    base = OUT / sid
    (base / "golden_search_response.json").write_text(
        json.dumps(on.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    queries_payload = {
        "queries": [
            {"text": q.text, "score": round(q.score, 6), "tokens": list(q.tokens)}
            for q in rec.queries
        ],
        "graph_dot": rec.graph_dot,
    }
    (base / "golden_queries_response.json").write_text(
        json.dumps(queries_payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"  {sid}: corpus={len(on.corpus)} results={len(on.results)} "
        f"query='{on.query.text}' elapsed={elapsed:.2f}s"
    )


def main() -> None:
    rng = random.Random(407)
    scenarios = [build_cme(rng), build_npe(rng)]
    for scenario in scenarios:
        write_scenario(scenario)
    print("fixtures written; verifying:")
    for scenario in scenarios:
        verify_and_freeze(scenario)
    print("ok")


if __name__ == "__main__":
    main()
