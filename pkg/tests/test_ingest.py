from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from octoscore import (
    EmptyDocument,
    HttpError,
    NetworkError,
    OfflineError,
    TooLarge,
    fetch_page,
    ingest_page,
    keyword_present,
    load_page,
    parse_stats,
)
from octoscore.ingest import SourceKind


# ---------------------------------------------------------------------------
# parse_stats
# ---------------------------------------------------------------------------

def test_counts_start_tags_only():
    stats = parse_stats(b"<html><body><p>hi</p><p>yo</p></body></html>")
    assert stats.total_tags == 4
    assert stats.tag_counts == {"html": 1, "body": 1, "p": 2}


def test_self_closing_tags_count_once():
    stats = parse_stats(b"<div/>" * 10)
    assert stats.total_tags == 10
    assert stats.tag_counts == {"div": 10}


def test_plain_text_raises_empty_document():
    with pytest.raises(EmptyDocument):
        parse_stats(b"just words, no markup at all")


def test_comments_doctype_and_close_tags_not_counted():
    raw = b"<!DOCTYPE html><!-- <fake> --><p>x</p><?pi data?>"
    stats = parse_stats(raw)
    assert stats.tag_counts == {"p": 1}


def test_uppercase_tags_are_normalised():
    stats = parse_stats(b"<DIV><IMG SRC='x'></DIV>")
    assert stats.tag_counts == {"div": 1, "img": 1}


def test_corpus_is_full_lowercased_source():
    stats = parse_stats(b"<p class='Hero'>Big SALE</p><script>var Cart=1;</script>")
    assert "class='hero'" in stats.text_corpus
    assert "big sale" in stats.text_corpus
    assert "var cart=1;" in stats.text_corpus


def test_minimal_fixture_has_twelve_tags(fixtures_dir):
    raw, source = load_page(fixtures_dir / "minimal.html")
    stats = parse_stats(raw, source)
    assert stats.total_tags == 12
    assert stats.tag_counts == {
        "html": 1,
        "head": 1,
        "meta": 1,
        "title": 1,
        "body": 1,
        "h1": 1,
        "p": 1,
        "a": 1,
        "ul": 1,
        "li": 2,
        "img": 1,
    }
    assert stats.source is not None and stats.source.kind is SourceKind.FILE


def test_invalid_utf8_is_replaced_not_fatal():
    stats = parse_stats(b"<p>caf\xff</p>")
    assert stats.tag_counts == {"p": 1}


@given(raw=st.binary(max_size=2048))
def test_any_bytes_parse_or_raise_empty_document(raw):
    try:
        stats = parse_stats(raw)
    except EmptyDocument:
        return
    assert stats.total_tags == sum(stats.tag_counts.values())
    assert stats.total_tags > 0
    for name, count in stats.tag_counts.items():
        assert name == name.lower()
        assert 0 <= count <= stats.total_tags


SIMPLE_FRAGMENTS = st.lists(
    st.sampled_from(["<p>x</p>", "<div><span>y</span></div>", "<img>", "<ul><li>z</li></ul>"]),
    min_size=1,
    max_size=8,
)


@given(left=SIMPLE_FRAGMENTS, right=SIMPLE_FRAGMENTS)
def test_concatenation_adds_tag_counts(left, right):
    first = parse_stats("".join(left).encode())
    second = parse_stats("".join(right).encode())
    combined = parse_stats(("".join(left) + "".join(right)).encode())
    for name in set(first.tag_counts) | set(second.tag_counts):
        assert combined.tag_counts.get(name, 0) == first.tag_counts.get(
            name, 0
        ) + second.tag_counts.get(name, 0)
    assert combined.total_tags == first.total_tags + second.total_tags


# ---------------------------------------------------------------------------
# keyword_present
# ---------------------------------------------------------------------------

def test_keyword_match_is_case_insensitive():
    stats = parse_stats(b"<p>customer feedback form</p>")
    assert keyword_present(stats, "Feedback")
    assert keyword_present(stats, "FEEDBACK")


def test_keyword_absent():
    stats = parse_stats(b"<p>nothing else</p>")
    assert not keyword_present(stats, "bulletin boards")


def test_keyword_found_inside_inline_script(fixtures_dir):
    raw, _ = load_page(fixtures_dir / "script_ajax.html")
    stats = parse_stats(raw)
    assert keyword_present(stats, "ajax")
    assert keyword_present(stats, "XMLHttpRequest")


def test_whole_word_mode_requires_boundaries():
    stats = parse_stats(b"<p>scart is not a cart</p>")
    assert keyword_present(stats, "cart")
    assert keyword_present(stats, "cart", whole_word=True)
    only_scart = parse_stats(b"<p>scart only</p>")
    assert keyword_present(only_scart, "cart")
    assert not keyword_present(only_scart, "cart", whole_word=True)


def test_empty_pattern_rejected():
    stats = parse_stats(b"<p>x</p>")
    with pytest.raises(ValueError):
        keyword_present(stats, "")


@given(
    pattern=st.text(
        alphabet=st.characters(min_codepoint=ord("a"), max_codepoint=ord("z")),
        min_size=1,
        max_size=12,
    ),
    flip=st.sampled_from([str.upper, str.title, str.lower, str.swapcase]),
)
def test_pattern_case_never_changes_the_answer(pattern, flip):
    stats = parse_stats(f"<p>{pattern} and padding</p>".encode())
    assert keyword_present(stats, flip(pattern)) == keyword_present(stats, pattern)


# ---------------------------------------------------------------------------
# load_page / fetch_page
# ---------------------------------------------------------------------------

def test_load_page_returns_exact_bytes(fixtures_dir):
    raw, source = load_page(fixtures_dir / "minimal.html")
    assert raw == (fixtures_dir / "minimal.html").read_bytes()
    assert source.byte_length == len(raw)
    assert source.kind is SourceKind.FILE


def test_load_empty_file_then_parse_raises(fixtures_dir):
    raw, _ = load_page(fixtures_dir / "empty.html")
    assert raw == b""
    with pytest.raises(EmptyDocument):
        parse_stats(raw)


def test_load_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_page(tmp_path / "does-not-exist.html")


def test_fetch_root_returns_served_page(http_fixture_server, fixtures_dir):
    body, source = fetch_page(f"{http_fixture_server}/")
    assert body == (fixtures_dir / "shop.html").read_bytes()
    assert source.kind is SourceKind.URL
    assert source.byte_length == len(body)


def test_fetch_follows_three_redirects(http_fixture_server):
    body, _ = fetch_page(f"{http_fixture_server}/redirect/3")
    assert b"final stop" in body


def test_fetch_redirect_loop_is_a_network_error(http_fixture_server):
    with pytest.raises(NetworkError):
        fetch_page(f"{http_fixture_server}/loop")


def test_fetch_unroutable_host_is_a_network_error():
    with pytest.raises(NetworkError):
        fetch_page("http://127.0.0.1:1/", timeout=2)


def test_fetch_non_2xx_is_http_error(http_fixture_server):
    with pytest.raises(HttpError) as excinfo:
        fetch_page(f"{http_fixture_server}/missing")
    assert excinfo.value.status == 404


def test_fetch_body_over_cap_is_too_large(http_fixture_server):
    with pytest.raises(TooLarge):
        fetch_page(f"{http_fixture_server}/big", max_bytes=1024)


def test_fetch_rejects_relative_and_non_http():
    with pytest.raises(ValueError):
        fetch_page("ftp://example.com/x")
    with pytest.raises(ValueError):
        fetch_page("not-a-url")


def test_ingest_page_offline_refuses_urls(fixtures_dir):
    with pytest.raises(OfflineError):
        ingest_page("http://example.com/", offline=True)
    stats = ingest_page(str(fixtures_dir / "minimal.html"), offline=True)
    assert stats.total_tags == 12
