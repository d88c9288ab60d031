"""Rank agreement, contribution analysis, and the mapping-revision advisor."""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .core import DIMENSIONS, Dimension, Experiment, ScaleVector, SiteScore
from .errors import (
    DuplicateSite,
    EmptyRun,
    MissingCategory,
    SiteSetMismatch,
    ValidationError,
    ZeroContribution,
    ZeroTotal,
)

DEFAULT_RELATION_THRESHOLD = 0.6
DEFAULT_DIMENSION_THRESHOLD = 0.25
DEFAULT_NEGLIGIBLE_THRESHOLD = 0.05


@dataclass(frozen=True)
class GroundTruthEntry:
    site: str
    cr: float
    category: str | None = None


@dataclass(frozen=True)
class GroundTruth:
    """Conversion-rate ground truth used to verify a run's ordering."""

    entries: tuple[GroundTruthEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        seen: set[str] = set()
        for entry in self.entries:
            if entry.site in seen:
                raise ValidationError(f"duplicate ground-truth site {entry.site!r}")
            seen.add(entry.site)
            if not 0 <= entry.cr <= 100:
                raise ValidationError(
                    f"conversion rate for {entry.site!r} must be in [0, 100], got {entry.cr}"
                )

    @classmethod
    def from_csv(cls, path: str | Path) -> "GroundTruth":
        """Load a ``site,cr,category`` CSV (category column optional)."""
        return cls.from_csv_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_csv_text(cls, text: str) -> "GroundTruth":
        reader = csv.DictReader(io.StringIO(text))
        fields = reader.fieldnames or []
        if "site" not in fields or "cr" not in fields:
            raise ValidationError("ground-truth CSV needs a 'site,cr[,category]' header")
        entries = []
        for row in reader:
            site = (row.get("site") or "").strip()
            if not site:
                continue
            try:
                cr = float(row["cr"])
            except (TypeError, ValueError):
                raise ValidationError(f"bad conversion rate for site {site!r}: {row.get('cr')!r}")
            category = (row.get("category") or "").strip() or None
            entries.append(GroundTruthEntry(site=site, cr=cr, category=category))
        return cls(entries=tuple(entries))

    def entry_for(self, site: str) -> GroundTruthEntry | None:
        for entry in self.entries:
            if entry.site == site:
                return entry
        return None

    def restricted_to(self, sites: Iterable[str]) -> "GroundTruth":
        wanted = set(sites)
        return GroundTruth(tuple(e for e in self.entries if e.site in wanted))

    def ranking(self) -> "Ranking":
        return rank_by([(e.site, e.cr) for e in self.entries])


@dataclass(frozen=True)
class RankedSite:
    site: str
    value: float
    rank: int


@dataclass(frozen=True)
class Ranking:
    """Sites in descending value order with competition ranks (ties share
    a rank, the next rank skips)."""

    ordered: tuple[RankedSite, ...]

    def rank_of(self, site: str) -> int:
        for item in self.ordered:
            if item.site == site:
                return item.rank
        raise KeyError(site)

    def sites(self) -> frozenset[str]:
        return frozenset(item.site for item in self.ordered)


@dataclass(frozen=True)
class RankDiffEntry:
    site: str
    expected_rank: int
    actual_rank: int
    abs_diff: int


@dataclass(frozen=True)
class RankDiffReport:
    per_site: tuple[RankDiffEntry, ...]
    mean_abs_diff: float


@dataclass(frozen=True)
class ContributionRow:
    dimension: Dimension
    attribute_count: int
    contribution_pct: float
    std_dev: float
    mean_subtotal: float


@dataclass(frozen=True)
class ContributionReport:
    rows: tuple[ContributionRow, ...]

    def row_for(self, dimension: Dimension) -> ContributionRow:
        return self.rows[DIMENSIONS.index(dimension)]


class AdviceKind(Enum):
    RELATION_DOMINATES = "relation_dominates"
    DIMENSION_DOMINATES = "dimension_dominates"
    DIMENSION_NEGLIGIBLE = "dimension_negligible"
    LOW_DISPERSION = "low_dispersion"
    SINGLE_RELATION = "single_relation"
    RECHECK_MAPPINGS = "recheck_mappings"


@dataclass(frozen=True)
class Advice:
    kind: AdviceKind
    message: str
    dimension: Dimension | None = None
    relation: str | None = None
    value: float | None = None


def rank_by(values: Sequence[tuple[str, float]]) -> Ranking:
    """Rank sites by descending value.

    Ties share the smallest available rank and the next rank skips
    (competition ranking); tied sites are listed in ascending name order to
    keep output deterministic.
    """
    sites = [site for site, _ in values]
    if len(sites) != len(set(sites)):
        dupes = sorted({s for s in sites if sites.count(s) > 1})
        raise DuplicateSite(f"duplicate site(s) in ranking input: {dupes}")

    ordered = sorted(values, key=lambda pair: (-pair[1], pair[0]))
    ranked: list[RankedSite] = []
    for position, (site, value) in enumerate(ordered, start=1):
        if ranked and value == ranked[-1].value:
            rank = ranked[-1].rank
        else:
            rank = position
        ranked.append(RankedSite(site=site, value=value, rank=rank))
    return Ranking(ordered=tuple(ranked))


def rank_diff(expected: Ranking, actual: Ranking) -> RankDiffReport:
    """Per-site absolute rank differences between two orderings of one set."""
    if expected.sites() != actual.sites():
        only_expected = sorted(expected.sites() - actual.sites())
        only_actual = sorted(actual.sites() - expected.sites())
        raise SiteSetMismatch(
            f"site sets differ (only in expected: {only_expected}, only in actual: {only_actual})"
        )
    entries = tuple(
        RankDiffEntry(
            site=item.site,
            expected_rank=item.rank,
            actual_rank=actual.rank_of(item.site),
            abs_diff=abs(item.rank - actual.rank_of(item.site)),
        )
        for item in expected.ordered
    )
    mean = math.fsum(e.abs_diff for e in entries) / len(entries) if entries else 0.0
    return RankDiffReport(per_site=entries, mean_abs_diff=mean)


def contribution_table(scores: Sequence[SiteScore]) -> ContributionReport:
    """Per-dimension share of the run's summed total, plus dispersion.

    The share is ``100 * sum_over_sites(subtotal) / sum_over_sites(total)``;
    dispersion is the population standard deviation of the subtotals across
    sites.  ``mean_subtotal`` is carried along so a scale vector can later be
    sized without revisiting the raw scores.
    """
    if not scores:
        raise EmptyRun("contribution table needs at least one scored site")
    experiment_ids = {s.experiment_id for s in scores}
    if len(experiment_ids) > 1:
        raise ValidationError(
            f"scores mix experiments {sorted(experiment_ids)}; one run expected"
        )
    grand_total = math.fsum(s.total_raw for s in scores)
    if grand_total == 0:
        raise ZeroTotal("all sites scored zero; contributions are undefined")

    rows = []
    for index, dimension in enumerate(DIMENSIONS):
        subtotals = [s.dimension_scores[index].subtotal for s in scores]
        rows.append(
            ContributionRow(
                dimension=dimension,
                attribute_count=len(scores[0].dimension_scores[index].relation_scores),
                contribution_pct=100.0 * math.fsum(subtotals) / grand_total,
                std_dev=statistics.pstdev(subtotals),
                mean_subtotal=statistics.fmean(subtotals),
            )
        )
    return ContributionReport(rows=tuple(rows))


def category_averages(
    scores: Sequence[SiteScore], truth: GroundTruth
) -> dict[str, float]:
    """Arithmetic mean of the scaled total per ground-truth category."""
    buckets: dict[str, list[float]] = {}
    for score in scores:
        entry = truth.entry_for(score.site)
        if entry is None or not entry.category:
            raise MissingCategory(f"site {score.site!r} has no category in the ground truth")
        buckets.setdefault(entry.category, []).append(score.total_scaled)
    return {
        category: statistics.fmean(values)
        for category, values in sorted(buckets.items())
    }


def advise(
    scores: Sequence[SiteScore],
    experiment: Experiment,
    relation_dominance_threshold: float = DEFAULT_RELATION_THRESHOLD,
    dimension_dominance_threshold: float = DEFAULT_DIMENSION_THRESHOLD,
    negligible_threshold: float = DEFAULT_NEGLIGIBLE_THRESHOLD,
) -> list[Advice]:
    """Mechanised mapping-review hints for the next experiment revision.

    Emits, in order: relation-dominance flags (a relation's mean share of
    its dimension subtotal exceeds the relation threshold), dimension
    dominance/negligibility flags against the run's contribution shares, a
    low-dispersion flag for the dimension with the smallest subtotal spread
    when it has five or more relations, and always a closing reminder that
    relation semantics need a human re-check, which is never automated.
    """
    if not scores:
        raise EmptyRun("advisor needs at least one scored site")
    mismatched = {s.experiment_id for s in scores} - {experiment.id}
    if mismatched:
        raise ValidationError(
            f"run was scored under {sorted(mismatched)}, not {experiment.id!r}"
        )
    contributions = contribution_table(scores)
    advices: list[Advice] = []

    for index, dimension in enumerate(DIMENSIONS):
        relation_names = [name for name, _ in scores[0].dimension_scores[index].relation_scores]
        if len(relation_names) == 1:
            advices.append(
                Advice(
                    kind=AdviceKind.SINGLE_RELATION,
                    dimension=dimension,
                    relation=relation_names[0],
                    message=(
                        f"{dimension.value} has a single relation, so the "
                        "relation-dominance check does not apply to it."
                    ),
                )
            )
            continue
        shares: dict[str, list[float]] = {name: [] for name in relation_names}
        for score in scores:
            dim_score = score.dimension_scores[index]
            if dim_score.subtotal <= 0:
                continue
            for name, value in dim_score.relation_scores:
                shares[name].append(value / dim_score.subtotal)
        for name in relation_names:
            observed = shares[name]
            if not observed:
                continue
            mean_share = statistics.fmean(observed)
            if mean_share > relation_dominance_threshold:
                advices.append(
                    Advice(
                        kind=AdviceKind.RELATION_DOMINATES,
                        dimension=dimension,
                        relation=name,
                        value=mean_share,
                        message=(
                            f"relation {name!r} supplies {mean_share:.0%} of the "
                            f"{dimension.value} subtotal on average; lower its weight "
                            "so the other relations can register."
                        ),
                    )
                )

    for row in contributions.rows:
        if row.contribution_pct > dimension_dominance_threshold * 100:
            advices.append(
                Advice(
                    kind=AdviceKind.DIMENSION_DOMINATES,
                    dimension=row.dimension,
                    value=row.contribution_pct,
                    message=(
                        f"{row.dimension.value} contributes {row.contribution_pct:.2f}% of the "
                        "run total; scale its scores down (a suggested scale vector can be "
                        "derived from this contribution table)."
                    ),
                )
            )
        elif row.contribution_pct < negligible_threshold * 100:
            advices.append(
                Advice(
                    kind=AdviceKind.DIMENSION_NEGLIGIBLE,
                    dimension=row.dimension,
                    value=row.contribution_pct,
                    message=(
                        f"{row.dimension.value} contributes only {row.contribution_pct:.2f}% of "
                        "the run total; raise its weights or scale so it can influence the result."
                    ),
                )
            )

    min_std = min(row.std_dev for row in contributions.rows)
    for row in contributions.rows:
        if row.std_dev == min_std and row.attribute_count >= 5:
            advices.append(
                Advice(
                    kind=AdviceKind.LOW_DISPERSION,
                    dimension=row.dimension,
                    value=row.std_dev,
                    message=(
                        f"{row.dimension.value} has the lowest score spread across sites despite "
                        f"{row.attribute_count} relations; some of them may overlap in meaning, "
                        "so consider pruning."
                    ),
                )
            )

    advices.append(
        Advice(
            kind=AdviceKind.RECHECK_MAPPINGS,
            message=(
                "Re-examine every dimension's relation list against the 8C definitions "
                "and add or remove relations where coverage has drifted; this step "
                "needs human judgement."
            ),
        )
    )
    return advices


def suggest_scale(contributions: ContributionReport) -> ScaleVector:
    """Derive a scale vector that pulls contributions toward equal shares.

    Each multiplier is proportional to the inverse contribution, normalised
    so the smallest is 1 and rounded to 2 decimals.  The post-divisor is the
    power of 10 that lands the mean scaled total in [10, 100).
    """
    for row in contributions.rows:
        if row.contribution_pct <= 0:
            raise ZeroContribution(
                f"{row.dimension.value} contributes nothing; scale suggestion undefined"
            )
    inverses = [1.0 / row.contribution_pct for row in contributions.rows]
    smallest = min(inverses)
    p = tuple(round(inv / smallest, 2) for inv in inverses)

    mean_scaled = math.fsum(
        row.mean_subtotal * factor for row, factor in zip(contributions.rows, p)
    )
    if mean_scaled > 0:
        post_divisor = 10.0 ** (math.floor(math.log10(mean_scaled)) - 1)
    else:
        post_divisor = 1.0
    return ScaleVector(p=p, post_divisor=post_divisor)
