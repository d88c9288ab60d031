"""Evaluate many locators against one experiment with bounded parallelism."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .core import Experiment, SiteScore, score_site
from .ingest import (
    DEFAULT_MAX_BYTES,
    DEFAULT_TIMEOUT,
    DEFAULT_USER_AGENT,
    ingest_page,
)

DEFAULT_PARALLELISM = 8


def evaluate_locator(
    experiment: Experiment,
    locator: str,
    offline: bool = False,
    timeout: float = DEFAULT_TIMEOUT,
    user_agent: str = DEFAULT_USER_AGENT,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> SiteScore:
    """Ingest one URL or file and score it; raises on any failure."""
    stats = ingest_page(
        locator,
        offline=offline,
        timeout=timeout,
        user_agent=user_agent,
        max_bytes=max_bytes,
    )
    return score_site(experiment, stats, site=locator)


def evaluate_many(
    experiment: Experiment,
    locators: Sequence[str],
    parallelism: int = DEFAULT_PARALLELISM,
    offline: bool = False,
    timeout: float = DEFAULT_TIMEOUT,
    user_agent: str = DEFAULT_USER_AGENT,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> tuple[list[SiteScore], list[tuple[str, str]]]:
    """Score a batch of locators; one failure never aborts the rest.

    Pages are fetched on a bounded thread pool but results are reported in
    input order, so downstream reports do not depend on completion order.
    """

    def one(locator: str) -> SiteScore | Exception:
        try:
            return evaluate_locator(
                experiment,
                locator,
                offline=offline,
                timeout=timeout,
                user_agent=user_agent,
                max_bytes=max_bytes,
            )
        except Exception as exc:  # collected per site below
            return exc

    workers = max(1, parallelism)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(one, locators))

    scores: list[SiteScore] = []
    failures: list[tuple[str, str]] = []
    for locator, outcome in zip(locators, outcomes):
        if isinstance(outcome, Exception):
            failures.append((locator, f"{type(outcome).__name__}: {outcome}"))
        else:
            scores.append(outcome)
    return scores, failures
