"""Command-line front end: outputs, exit codes, stdin handling."""

from __future__ import annotations

import csv
import io
import json

import pytest

from surf.cli import main

EXC = "ConcurrentModificationException"


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1


@pytest.fixture()
def paths(cme_scenario_dir):
    return {
        "trace": str(cme_scenario_dir / "trace.txt"),
        "code": str(cme_scenario_dir / "context.java"),
        "providers": str(cme_scenario_dir / "providers"),
        "pages": str(cme_scenario_dir / "pages.json"),
    }


def search_argv(paths, *extra):
    return [
        "search", "--trace-file", paths["trace"], "--code-file", paths["code"],
        "--fixtures-dir", paths["providers"], "--pages-file", paths["pages"],
        *extra,
    ]


# ── queries ──────────────────────────────────────────────────────────────────

def test_queries_table_output(paths, capsys):
    assert run_cli(["queries", "--trace-file", paths["trace"]]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 6  # header + five queries
    assert f"Itr checkForComodification {EXC}" in lines[1]


def test_queries_json_output(paths, capsys):
    code = run_cli(
        ["queries", "--trace-file", paths["trace"], "--code-file", paths["code"], "--json"]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"queries", "graph_dot"}
    assert payload["queries"][0]["text"] == f"{EXC} ArrayList Itr checkForComodification"
    assert len(payload["queries"]) == 5


def test_queries_reads_stdin(paths, capsys, monkeypatch, cme_trace_text):
    monkeypatch.setattr("sys.stdin", io.StringIO(cme_trace_text))
    assert run_cli(["queries", "--trace-file", "-"]) == 0
    assert EXC in capsys.readouterr().out


def test_queries_writes_dot_file(paths, tmp_path, capsys):
    dot_path = tmp_path / "graph.dot"
    assert run_cli(["queries", "--trace-file", paths["trace"], "--dot", str(dot_path)]) == 0
    assert dot_path.read_text(encoding="utf-8").startswith("digraph token_graph {")


def test_queries_custom_fusion_weights(paths, capsys):
    assert run_cli(
        ["queries", "--trace-file", paths["trace"], "--weights", "1,0,0", "--json"]
    ) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["queries"][0]["text"].startswith(f"{EXC} ")


def test_queries_bad_weights_is_usage_error(paths, capsys):
    assert run_cli(["queries", "--trace-file", paths["trace"], "--weights", "a,b,c"]) == 1
    assert run_cli(["queries", "--trace-file", paths["trace"], "--weights", "1,0"]) == 1
    err = capsys.readouterr().err
    assert "--weights" in err


def test_queries_requires_trace_file(capsys):
    assert run_cli(["queries"]) == 1
    assert "--trace-file" in capsys.readouterr().err


# ── search ───────────────────────────────────────────────────────────────────

def test_search_json_matches_golden(paths, cme_scenario_dir, capsys):
    assert run_cli(search_argv(paths, "--json")) == 0
    payload = json.loads(capsys.readouterr().out)
    golden = json.loads(
        (cme_scenario_dir / "golden_search_response.json").read_text(encoding="utf-8")
    )
    assert payload == golden


def test_search_table_output(paths, capsys):
    assert run_cli(search_argv(paths)) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 61  # header + two lines per result
    assert lines[0].lstrip().startswith("#")
    assert lines[1].lstrip().startswith("1")


def test_search_keyword_query(paths, capsys):
    code = run_cli([
        "search", f"{EXC} ArrayList", "--fixtures-dir", paths["providers"],
        "--pages-file", paths["pages"], "--json",
    ])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["results"]) == 30
    assert all(r["context_relevance"] == 0.0 for r in payload["results"])


def test_search_no_context_flag(paths, capsys):
    assert run_cli(search_argv(paths, "--no-context", "--json")) == 0
    payload = json.loads(capsys.readouterr().out)
    assert all(r["context_relevance"] == 0.0 for r in payload["results"])


def test_search_rank_weights_flag(paths, capsys):
    assert run_cli(search_argv(paths, "--rank-weights", "1,0,0,0", "--json")) == 0
    payload = json.loads(capsys.readouterr().out)
    for row in payload["results"]:
        assert row["final_score"] == pytest.approx(row["content_relevance"], abs=1e-6)


def test_search_top_flag(paths, capsys):
    assert run_cli(search_argv(paths, "--top", "7", "--json")) == 0
    assert len(json.loads(capsys.readouterr().out)["results"]) == 7


def test_search_usage_errors(paths, capsys, tmp_path):
    assert run_cli(["search"]) == 1
    assert run_cli(["search", "--rank-weights", "0.5,0.5", "q",
                    "--fixtures-dir", paths["providers"]]) == 1
    missing = tmp_path / "nope.txt"
    assert run_cli(["search", "--trace-file", str(missing),
                    "--fixtures-dir", paths["providers"]]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_search_pipeline_failure_exits_2(tmp_path, capsys):
    empty_fixtures = tmp_path / "providers"
    empty_fixtures.mkdir()
    code = run_cli(["search", "some query", "--fixtures-dir", str(empty_fixtures)])
    assert code == 2
    assert "surf:" in capsys.readouterr().err


def test_unknown_command_exits_1(capsys):
    assert run_cli(["frobnicate"]) == 1


def test_no_command_prints_help(capsys):
    assert run_cli([]) == 1
    assert "usage" in capsys.readouterr().out.lower()


def test_bad_config_path_exits_1(paths, capsys):
    code = run_cli(["--config", "/nonexistent/surf.toml",
                    "queries", "--trace-file", paths["trace"]])
    assert code == 1
    assert "cannot load config" in capsys.readouterr().err


def test_config_top_n_applies_to_search(paths, tmp_path, capsys):
    cfg = tmp_path / "surf.toml"
    cfg.write_text("[rank]\ntop_n = 4\n", encoding="utf-8")
    assert run_cli(["--config", str(cfg), *search_argv(paths, "--json")]) == 0
    assert len(json.loads(capsys.readouterr().out)["results"]) == 4


# ── eval ─────────────────────────────────────────────────────────────────────

def test_eval_csv_to_stdout(scenarios_dir, capsys):
    assert run_cli(["eval", "--fixtures-dir", str(scenarios_dir)]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0][:4] == ["scenario_id", "query", "pyramid", "corpus_size"]
    assert [r[0] for r in rows[1:]] == ["cme-arraylist", "npe-profile"]
    for row in rows[1:]:
        assert 100 <= int(row[3]) <= 120
        assert 0.0 < float(row[2]) <= 1.0


def test_eval_csv_to_file(scenarios_dir, tmp_path, capsys):
    out = tmp_path / "report.csv"
    assert run_cli(["eval", "--fixtures-dir", str(scenarios_dir), "--out", str(out)]) == 0
    assert "wrote" in capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(out.read_text(encoding="utf-8"))))
    assert len(rows) == 3


def test_eval_without_scenarios_is_usage_error(tmp_path, capsys):
    assert run_cli(["eval", "--fixtures-dir", str(tmp_path)]) == 1
    assert "no scenarios" in capsys.readouterr().err


# ── watch ────────────────────────────────────────────────────────────────────

def test_watch_stdin_json_events(monkeypatch, capsys, cme_trace_text):
    stream = "boot noise\n" + cme_trace_text + cme_trace_text + "tail noise\n"
    monkeypatch.setattr("sys.stdin", io.StringIO(stream))
    assert run_cli(["watch", "--json"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
    assert len(lines) == 1  # duplicate trace debounced
    event = json.loads(lines[0])
    assert event["exception"] == "java.util.ConcurrentModificationException"
    assert event["query"]["text"] == f"Itr checkForComodification {EXC}"


def test_watch_plain_output(monkeypatch, capsys, cme_trace_text):
    monkeypatch.setattr("sys.stdin", io.StringIO(cme_trace_text))
    assert run_cli(["watch"]) == 0
    out = capsys.readouterr().out
    assert "[stdin] java.util.ConcurrentModificationException ->" in out


def test_watch_auto_search(monkeypatch, capsys, cme_trace_text, paths):
    monkeypatch.setattr("sys.stdin", io.StringIO(cme_trace_text))
    code = run_cli([
        "watch", "--auto-search",
        "--fixtures-dir", paths["providers"], "--pages-file", paths["pages"],
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "    1. [" in out
    assert out.count(". [") == 5  # top five hits per event
