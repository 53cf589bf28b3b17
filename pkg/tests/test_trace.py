"""Trace detection, parsing, rendering, and tokenization."""

from __future__ import annotations

import random

import pytest

from oracles import split_identifier_oracle, trace_tokens_oracle
from surf.errors import MalformedTrace
from surf.trace import (
    Frame,
    TokenKind,
    context_frequency,
    detect_traces,
    extract_tokens,
    parse_trace,
    render,
    split_words,
    tokenize_code,
)


# ── detect_traces ────────────────────────────────────────────────────────────

def test_detect_finds_trace_embedded_in_log_noise(cme_trace_text):
    text = (
        "INFO starting build\n"
        "DEBUG loading classpath\n" + cme_trace_text + "INFO build failed\n"
    )
    spans = detect_traces(text)
    assert len(spans) == 1
    assert spans[0].lines == tuple(cme_trace_text.splitlines())


def test_detect_empty_input():
    assert detect_traces("") == []


def test_detect_two_copies_yield_two_spans(cme_trace_text):
    text = cme_trace_text + "\n" + cme_trace_text
    spans = detect_traces(text)
    assert len(spans) == 2
    n_lines = len(cme_trace_text.splitlines())
    assert spans[0].start == 0 and spans[0].end - spans[0].start == n_lines
    assert spans[1].start == n_lines + 1
    assert spans[0].lines == spans[1].lines


def test_detect_spans_are_verbatim_and_non_overlapping(cme_trace_text, caused_trace_text):
    text = "x\n" + cme_trace_text + "middle line\n" + caused_trace_text + "y\n"
    all_lines = text.splitlines()
    spans = detect_traces(text)
    assert len(spans) == 2
    previous_end = -1
    for span in spans:
        assert span.start > previous_end
        assert list(span.lines) == all_lines[span.start : span.end]
        previous_end = span.end


def test_detect_ignores_header_without_frames():
    assert detect_traces("java.lang.RuntimeException: boom\nnothing else\n") == []


# ── parse_trace ──────────────────────────────────────────────────────────────

def test_parse_cme_structure(cme_trace):
    assert cme_trace.exception_type == "java.util.ConcurrentModificationException"
    assert cme_trace.message is None
    assert cme_trace.caused_by is None
    frames = cme_trace.frames
    assert len(frames) == 3
    assert frames[0].class_fq == "java.util.ArrayList$Itr"
    assert frames[0].method == "checkForComodification"
    assert frames[0].file is None and frames[0].line is None
    assert frames[1].method == "next"
    assert frames[1].file is None
    assert frames[2] == Frame(
        class_fq="core.MyListManager", method="main",
        file="MyListManager.java", line=28, depth=2,
    )


def test_parse_header_only_is_malformed():
    with pytest.raises(MalformedTrace):
        parse_trace(["java.lang.RuntimeException: boom"])


def test_parse_garbage_is_malformed():
    with pytest.raises(MalformedTrace):
        parse_trace("!!! not a trace\n??? at all")


def test_parse_cause_chain(caused_trace_text):
    trace = parse_trace(caused_trace_text)
    assert trace.exception_type == "java.lang.RuntimeException"
    assert trace.message == "Failed to load user profile"
    assert len(trace.frames) == 2
    cause = trace.caused_by
    assert cause is not None
    assert cause.exception_type == "java.lang.NullPointerException"
    assert cause.frames[0].method == "findById"
    assert cause.frames[1].line == 40
    assert cause.caused_by is None
    assert [seg.exception_type for seg in trace.chain()] == [
        "java.lang.RuntimeException",
        "java.lang.NullPointerException",
    ]


def test_parse_accepts_space_indented_frames():
    text = (
        "   Exception in thread \"main\" java.util.ConcurrentModificationException\n"
        "   at java.util.ArrayList$Itr.checkForComodification(Unknown Source)\n"
        "   at core.MyListManager.main(MyListManager.java:28)\n"
    )
    trace = parse_trace(text)
    assert len(trace.frames) == 2
    assert trace.frames[1].line == 28


def test_parse_native_method_has_no_file():
    trace = parse_trace(
        "java.lang.RuntimeException\n\tat sun.misc.Unsafe.park(Native Method)\n"
    )
    assert trace.frames[0].file is None
    assert trace.frames[0].line is None


def test_render_canonical_format(cme_trace):
    assert render(cme_trace) == (
        "java.util.ConcurrentModificationException\n"
        "\tat java.util.ArrayList$Itr.checkForComodification(Unknown Source)\n"
        "\tat java.util.ArrayList$Itr.next(Unknown Source)\n"
        "\tat core.MyListManager.main(MyListManager.java:28)"
    )


def test_parse_render_parse_is_fixpoint(cme_trace_text, caused_trace_text):
    for text in (cme_trace_text, caused_trace_text):
        first = parse_trace(text)
        second = parse_trace(render(first))
        assert second == first
        assert render(second) == render(first)


# ── extract_tokens ───────────────────────────────────────────────────────────

def test_cme_tokens_texts_kinds_depths(cme_trace):
    tokens = extract_tokens(cme_trace)
    assert [(t.text, t.kind, t.min_depth) for t in tokens] == [
        ("ConcurrentModificationException", TokenKind.EXCEPTION_TYPE, 0),
        ("ArrayList", TokenKind.CLASS_NAME, 0),
        ("Itr", TokenKind.CLASS_NAME, 0),
        ("checkForComodification", TokenKind.METHOD_NAME, 0),
        ("next", TokenKind.METHOD_NAME, 1),
        ("MyListManager", TokenKind.CLASS_NAME, 2),
        ("main", TokenKind.METHOD_NAME, 2),
    ]


def test_tokens_match_string_surgery_oracle(cme_trace_text, caused_trace_text):
    for text in (cme_trace_text, caused_trace_text):
        expected = trace_tokens_oracle(text.splitlines())
        got = {t.text: t.min_depth for t in extract_tokens(parse_trace(text))}
        assert got == expected


def test_short_method_name_filtered():
    trace = parse_trace("x.y.SomeError\n\tat a.b.Widget.go(Widget.java:3)\n")
    texts = [t.text for t in extract_tokens(trace)]
    assert "go" not in texts
    assert "Widget" in texts


def test_stop_list_and_numeric_filtered():
    trace = parse_trace(
        "x.y.SomeError\n"
        "\tat a.b.Task$1.run(Task.java:5)\n"
        "\tat a.b.Caller.invoke(Caller.java:9)\n"
    )
    texts = {t.text for t in extract_tokens(trace)}
    assert texts == {"SomeError", "Task", "Caller"}


def test_main_method_is_kept(cme_trace):
    methods = [t for t in extract_tokens(cme_trace) if t.kind is TokenKind.METHOD_NAME]
    assert "main" in {t.text for t in methods}
    assert len(methods) > 1


def test_exception_simple_name_always_tokenized(cme_trace, caused_trace_text):
    assert "ConcurrentModificationException" in {t.text for t in extract_tokens(cme_trace)}
    caused = parse_trace(caused_trace_text)
    texts = {t.text for t in extract_tokens(caused)}
    assert {"RuntimeException", "NullPointerException", "findById", "UserRepository"} <= texts


def test_token_order_is_deterministic(cme_trace):
    assert extract_tokens(cme_trace) == extract_tokens(cme_trace)


def test_inner_class_parts_become_separate_tokens():
    trace = parse_trace("x.Err\n\tat p.q.Outer$Inner.work(Outer.java:1)\n")
    texts = [t.text for t in extract_tokens(trace)]
    assert "Outer" in texts and "Inner" in texts
    assert "Outer$Inner" not in texts


# ── tokenize_code / context_frequency ────────────────────────────────────────

def test_code_bag_hand_counted(cme_code_text):
    bag = tokenize_code(cme_code_text).identifier_bag
    assert dict(bag) == {
        "list": 7, "string": 6, "array": 1, "items": 2, "apple": 1,
        "orange": 1, "banana": 2, "mango": 1, "grape": 1, "item": 3,
        "add": 1, "deleting": 1, "particular": 1, "from": 1, "the": 1,
        "iterator": 2, "has": 1, "next": 2, "value": 3, "equals": 1,
        "remove": 1,
    }
    assert bag["iterator"] >= 2


def test_code_bag_empty_source():
    code = tokenize_code("")
    assert not code.identifier_bag
    assert code.empty


def test_camel_split_drops_short_parts():
    assert dict(tokenize_code("myListManager").identifier_bag) == {"list": 1, "manager": 1}


def test_keywords_filtered_after_splitting():
    assert dict(tokenize_code("myNewList").identifier_bag) == {"list": 1}
    assert dict(tokenize_code("int count = 0; while (true) return;").identifier_bag) == {
        "count": 1
    }


def test_snake_case_split():
    assert dict(tokenize_code("user_profile_id load_all").identifier_bag) == {
        "user": 1, "profile": 1, "load": 1, "all": 1,
    }


def test_context_frequency_sums_split_parts(cme_code):
    assert context_frequency("ArrayList", cme_code) == 8  # array 1 + list 7
    assert context_frequency("MyListManager", cme_code) == 7  # my dropped, list 7
    assert context_frequency("next", cme_code) == 2
    assert context_frequency("Itr", cme_code) == 0
    assert context_frequency("checkForComodification", cme_code) == 0


def test_split_words_matches_split_oracle():
    rng = random.Random(11)
    samples = [
        "ConcurrentModificationException", "checkForComodification", "my_list_manager",
        "HTTPServer2", "parseJSONBody", "value", "ArrayList$Itr", "a_b_c",
    ]
    for _ in range(50):
        word = "".join(
            rng.choice("abcXYZ_09$") for _ in range(rng.randint(1, 14))
        )
        samples.append(word)
    for sample in samples:
        assert split_words(sample) == split_identifier_oracle(sample)
