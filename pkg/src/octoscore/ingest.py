"""Page acquisition and reduction to the statistics the scorer consumes."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from html.parser import HTMLParser
from pathlib import Path
from urllib.parse import urlparse

import requests

from .errors import (
    EmptyDocument,
    HttpError,
    NetworkError,
    OfflineError,
    TooLarge,
)

DEFAULT_USER_AGENT = "octoscore/1.0"
DEFAULT_TIMEOUT = 20.0
DEFAULT_MAX_BYTES = 8 * 1024 * 1024
MAX_REDIRECTS = 5
_CHUNK = 64 * 1024


class SourceKind(Enum):
    URL = "url"
    FILE = "file"


@dataclass(frozen=True)
class PageSource:
    """Where a page capture came from."""

    kind: SourceKind
    locator: str
    fetched_at: datetime
    byte_length: int


@dataclass(frozen=True)
class DocumentStats:
    """Tag census and searchable text for one captured page.

    ``total_tags`` counts element start tags (void and self-closing elements
    included, close tags excluded).  ``text_corpus`` is the full lowercased
    markup, inline script and style text included, so keyword matching can
    see JavaScript/CSS identifiers as well as visible copy.
    """

    total_tags: int
    tag_counts: dict[str, int]
    text_corpus: str
    source: PageSource | None = None


class _TagCensus(HTMLParser):
    """Forgiving start-tag counter; never raises on malformed markup."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.counts: Counter[str] = Counter()

    def handle_starttag(self, tag: str, attrs) -> None:
        self.counts[tag] += 1

    def handle_startendtag(self, tag: str, attrs) -> None:
        self.counts[tag] += 1


def parse_stats(raw: bytes, source: PageSource | None = None) -> DocumentStats:
    """Reduce raw page bytes to a tag census plus lowercase text corpus.

    Comments, doctype declarations, processing instructions, and close tags
    are not counted.  Raises :class:`EmptyDocument` when no element tag is
    found at all.
    """
    text = raw.decode("utf-8", errors="replace")
    census = _TagCensus()
    census.feed(text)
    census.close()
    total = sum(census.counts.values())
    if total == 0:
        raise EmptyDocument("no element tags found in document")
    return DocumentStats(
        total_tags=total,
        tag_counts=dict(census.counts),
        text_corpus=text.lower(),
        source=source,
    )


def keyword_present(stats: DocumentStats, pattern: str, whole_word: bool = False) -> bool:
    """Case-insensitive search for ``pattern`` in the page's text corpus.

    Substring matching by default; ``whole_word=True`` requires word
    boundaries around the match.
    """
    if not pattern:
        raise ValueError("keyword pattern must be non-empty")
    needle = pattern.lower()
    if whole_word:
        return re.search(rf"\b{re.escape(needle)}\b", stats.text_corpus) is not None
    return needle in stats.text_corpus


def is_url(locator: str) -> bool:
    return urlparse(locator).scheme in ("http", "https")


def fetch_page(
    url: str,
    timeout: float = DEFAULT_TIMEOUT,
    user_agent: str = DEFAULT_USER_AGENT,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> tuple[bytes, PageSource]:
    """GET one page over HTTP(S), following at most 5 redirects.

    Raises :class:`NetworkError` for DNS/connect/timeout/redirect-loop
    failures, :class:`HttpError` for non-2xx statuses, and
    :class:`TooLarge` when the body exceeds ``max_bytes``.
    """
    parsed = urlparse(url)
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise ValueError(f"not an absolute http(s) URL: {url!r}")

    session = requests.Session()
    session.max_redirects = MAX_REDIRECTS
    try:
        response = session.get(
            url,
            timeout=timeout,
            headers={"User-Agent": user_agent},
            stream=True,
            allow_redirects=True,
        )
    except requests.exceptions.TooManyRedirects as exc:
        raise NetworkError(f"too many redirects for {url}: {exc}") from exc
    except (requests.exceptions.ConnectionError, requests.exceptions.Timeout) as exc:
        raise NetworkError(f"failed to fetch {url}: {exc}") from exc
    except requests.exceptions.RequestException as exc:
        raise NetworkError(f"failed to fetch {url}: {exc}") from exc

    with response:
        if not 200 <= response.status_code < 300:
            raise HttpError(response.status_code, url)

        declared = response.headers.get("Content-Length")
        if declared and declared.isdigit() and int(declared) > max_bytes:
            raise TooLarge(f"{url} declares {declared} bytes (cap {max_bytes})")

        chunks: list[bytes] = []
        size = 0
        try:
            for chunk in response.iter_content(chunk_size=_CHUNK):
                size += len(chunk)
                if size > max_bytes:
                    raise TooLarge(f"{url} body exceeds cap of {max_bytes} bytes")
                chunks.append(chunk)
        except requests.exceptions.RequestException as exc:
            raise NetworkError(f"connection lost while reading {url}: {exc}") from exc

    body = b"".join(chunks)
    source = PageSource(
        kind=SourceKind.URL,
        locator=url,
        fetched_at=datetime.now(timezone.utc),
        byte_length=len(body),
    )
    return body, source


def load_page(path: str | Path) -> tuple[bytes, PageSource]:
    """Read a local HTML capture; bytes are returned exactly as stored."""
    data = Path(path).read_bytes()
    source = PageSource(
        kind=SourceKind.FILE,
        locator=str(path),
        fetched_at=datetime.now(timezone.utc),
        byte_length=len(data),
    )
    return data, source


def ingest_page(
    locator: str,
    offline: bool = False,
    timeout: float = DEFAULT_TIMEOUT,
    user_agent: str = DEFAULT_USER_AGENT,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> DocumentStats:
    """Acquire a page by URL or file path and parse it in one step."""
    if is_url(locator):
        if offline:
            raise OfflineError(f"offline mode: refusing to fetch {locator}")
        raw, source = fetch_page(
            locator, timeout=timeout, user_agent=user_agent, max_bytes=max_bytes
        )
    else:
        raw, source = load_page(locator)
    return parse_stats(raw, source)
