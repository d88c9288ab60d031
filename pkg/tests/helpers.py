"""Shared builders for synthetic scores and pages used across the suite."""

from __future__ import annotations

from octoscore import (
    DIMENSIONS,
    DimensionScore,
    DocumentStats,
    ScaleVector,
    SiteScore,
    parse_stats,
)


def make_stats(html: str) -> DocumentStats:
    return parse_stats(html.encode("utf-8"))


def make_score(
    site: str,
    subtotals: tuple[float, ...],
    experiment_id: str = "synthetic",
    scale: ScaleVector | None = None,
    relation_counts: tuple[int, ...] | None = None,
) -> SiteScore:
    """Build a SiteScore directly from dimension subtotals.

    Each subtotal is split evenly over ``relation_counts[j]`` synthetic
    relations (default 1), which keeps the additivity invariant intact.
    """
    if scale is None:
        scale = ScaleVector.identity()
    counts = relation_counts or (1,) * len(DIMENSIONS)
    dimension_scores = []
    for dimension, subtotal, count in zip(DIMENSIONS, subtotals, counts):
        shares = tuple(
            (f"{dimension.value.lower()}-{i}", subtotal / count) for i in range(count)
        )
        dimension_scores.append(
            DimensionScore(
                dimension=dimension,
                relation_scores=shares,
                subtotal=sum(v for _, v in shares),
            )
        )
    all_subtotals = tuple(d.subtotal for d in dimension_scores)
    scaled = sum(sc * p for sc, p in zip(all_subtotals, scale.p)) / scale.post_divisor
    return SiteScore(
        site=site,
        dimension_scores=tuple(dimension_scores),
        total_raw=sum(all_subtotals),
        total_scaled=scaled,
        experiment_id=experiment_id,
    )


def page_with_tags(tag_counts: dict[str, int], text: str = "") -> str:
    """A well-formed page body holding exactly the requested start tags."""
    parts = [f"<{tag}></{tag}>" * count for tag, count in tag_counts.items()]
    return "".join(parts) + text


# Contribution shares, subtotal dispersion, and relation counts of the
# shipped exp8 defaults under the run that exposed the Context imbalance.
EXP8_CONTRIBUTION_SHARES = (40.94, 5.93, 9.04, 7.85, 12.47, 5.15, 14.68, 3.93)
EXP8_STD_DEVS = (15.43, 7.08, 7.77, 6.00, 6.55, 4.81, 8.30, 3.94)
EXP8_ATTRIBUTE_COUNTS = (28, 11, 18, 5, 13, 2, 10, 7)


def imbalanced_exp8_run(experiment_id: str = "exp8") -> list[SiteScore]:
    """Two sites engineered to the exp8 imbalance fixture.

    Contribution percentages land on the published shares (so Context
    dominates and Collaboration is negligible) and the subtotal spread is
    proportional to the published standard deviations (so Collaboration has
    the smallest spread while carrying 7 relations).
    """
    high = []
    low = []
    for share, spread in zip(EXP8_CONTRIBUTION_SHARES, EXP8_STD_DEVS):
        delta = 0.5 * spread / share
        high.append(share * (1 + delta))
        low.append(share * (1 - delta))
    return [
        make_score(
            "site-high",
            tuple(high),
            experiment_id,
            relation_counts=EXP8_ATTRIBUTE_COUNTS,
        ),
        make_score(
            "site-low",
            tuple(low),
            experiment_id,
            relation_counts=EXP8_ATTRIBUTE_COUNTS,
        ),
    ]
