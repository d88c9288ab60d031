"""8C domain model and the relation/dimension/site scoring formulas.

Scoring works in three layers:

* a relation score: for an HTML-tag relation,
  ``(tag occurrences / total tags) * scalar * weight``; for a keyword
  relation, the full weight when the keyword is present and 0 otherwise;
* a dimension subtotal: the sum of its relation scores;
* site totals: the raw total is the sum of the eight subtotals, and the
  scaled total re-weights each subtotal by the experiment's scale vector
  and divides by its post-divisor.

Everything here is pure and immutable, so sites can be scored in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

from .errors import EmptyDocument
from .ingest import DocumentStats, keyword_present

DEFAULT_SCALAR = 100.0


class Dimension(Enum):
    """The eight interface-design dimensions of the 8C framework."""

    CONTEXT = "Context"
    CONTENT = "Content"
    COMMUNITY = "Community"
    CUSTOMIZATION = "Customization"
    COMMUNICATION = "Communication"
    CONNECTION = "Connection"
    COMMERCE = "Commerce"
    COLLABORATION = "Collaboration"

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]


_DESCRIPTIONS = {
    Dimension.CONTEXT: "Layout and navigation: how the page is organised and presented.",
    Dimension.CONTENT: "What the site offers: text, imagery, media, product detail.",
    Dimension.COMMUNITY: "User-to-user interaction and social presence.",
    Dimension.CUSTOMIZATION: "The site's ability to tailor itself to each visitor.",
    Dimension.COMMUNICATION: "Site-to-user messaging channels.",
    Dimension.CONNECTION: "Formal links from the site out to other sites.",
    Dimension.COMMERCE: "Transactional features: cart, checkout, payment.",
    Dimension.COLLABORATION: "User feedback loops: forums, boards, review forms.",
}

DIMENSIONS: tuple[Dimension, ...] = tuple(Dimension)


class RelationKind(Enum):
    TAG = "tag"
    KEYWORD = "keyword"


@dataclass(frozen=True)
class Relation:
    """One weighted link between a dimension and an HTML tag or keyword.

    ``pattern`` holds the element name for tag relations (lowercase) or the
    search phrase for keyword relations.
    """

    name: str
    kind: RelationKind
    pattern: str
    weight: float

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("relation name must be non-empty")
        if not self.pattern:
            raise ValueError(f"relation {self.name!r}: pattern must be non-empty")
        if not math.isfinite(self.weight) or self.weight < 0:
            raise ValueError(f"relation {self.name!r}: weight must be finite and >= 0")
        if self.kind is RelationKind.TAG and self.pattern != self.pattern.lower():
            raise ValueError(
                f"relation {self.name!r}: tag pattern must be a lowercase element name"
            )


@dataclass(frozen=True)
class Mapping:
    """The ordered relation set attached to one dimension."""

    dimension: Dimension
    relations: tuple[Relation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "relations", tuple(self.relations))
        names = [r.name for r in self.relations]
        if len(names) != len(set(names)):
            raise ValueError(
                f"mapping for {self.dimension.value}: relation names must be unique"
            )


@dataclass(frozen=True)
class ScaleVector:
    """Per-dimension multipliers plus a final divisor for the scaled total."""

    p: tuple[float, ...]
    post_divisor: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        if len(self.p) != len(DIMENSIONS):
            raise ValueError(f"scale vector needs {len(DIMENSIONS)} entries, got {len(self.p)}")
        if any(not math.isfinite(x) or x < 0 for x in self.p):
            raise ValueError("scale entries must be finite and >= 0")
        if not math.isfinite(self.post_divisor) or self.post_divisor <= 0:
            raise ValueError("post_divisor must be > 0")

    @classmethod
    def identity(cls) -> "ScaleVector":
        return cls(p=(1.0,) * len(DIMENSIONS), post_divisor=1.0)


@dataclass(frozen=True)
class Experiment:
    """A versioned snapshot of all eight mappings plus scaling parameters.

    Mappings are normalised to the canonical dimension order regardless of
    the order they were supplied in.
    """

    id: str
    label: str
    mappings: tuple[Mapping, ...]
    scale: ScaleVector
    scalar: float = DEFAULT_SCALAR
    created_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("experiment id must be non-empty")
        if not math.isfinite(self.scalar) or self.scalar <= 0:
            raise ValueError("scalar must be finite and > 0")
        by_dim = {m.dimension: m for m in self.mappings}
        if len(by_dim) != len(self.mappings):
            raise ValueError(f"experiment {self.id!r}: duplicate dimension mappings")
        missing = [d.value for d in DIMENSIONS if d not in by_dim]
        if missing:
            raise ValueError(f"experiment {self.id!r}: missing mappings for {missing}")
        object.__setattr__(
            self, "mappings", tuple(by_dim[d] for d in DIMENSIONS)
        )

    def mapping_for(self, dimension: Dimension) -> Mapping:
        return self.mappings[DIMENSIONS.index(dimension)]


@dataclass(frozen=True)
class DimensionScore:
    """Relation scores and their sum for one dimension on one page."""

    dimension: Dimension
    relation_scores: tuple[tuple[str, float], ...]
    subtotal: float


@dataclass(frozen=True)
class SiteScore:
    """All eight dimension scores plus raw and scaled totals for one site."""

    site: str
    dimension_scores: tuple[DimensionScore, ...]
    total_raw: float
    total_scaled: float
    experiment_id: str

    @property
    def subtotals(self) -> tuple[float, ...]:
        return tuple(d.subtotal for d in self.dimension_scores)

    def subtotal_for(self, dimension: Dimension) -> float:
        return self.dimension_scores[DIMENSIONS.index(dimension)].subtotal


def score_relation(
    relation: Relation, stats: DocumentStats, scalar: float = DEFAULT_SCALAR
) -> float:
    """Score one relation against a page capture.

    Keyword relations contribute their full weight when present, else 0.
    Tag relations contribute ``occurrences / total_tags * scalar * weight``.
    """
    if relation.kind is RelationKind.KEYWORD:
        return relation.weight if keyword_present(stats, relation.pattern) else 0.0
    if stats.total_tags <= 0:
        raise EmptyDocument("cannot score a tag relation against a page with no tags")
    count = stats.tag_counts.get(relation.pattern, 0)
    return (count / stats.total_tags) * scalar * relation.weight


def score_dimension(
    mapping: Mapping, stats: DocumentStats, scalar: float = DEFAULT_SCALAR
) -> DimensionScore:
    """Score every relation of one dimension, in mapping order."""
    pairs = tuple(
        (r.name, score_relation(r, stats, scalar)) for r in mapping.relations
    )
    return DimensionScore(
        dimension=mapping.dimension,
        relation_scores=pairs,
        subtotal=sum(value for _, value in pairs),
    )


def _scaled_total(subtotals: tuple[float, ...], scale: ScaleVector) -> float:
    weighted = sum(sc * p for sc, p in zip(subtotals, scale.p))
    return weighted / scale.post_divisor


def score_site(experiment: Experiment, stats: DocumentStats, site: str) -> SiteScore:
    """Evaluate one page against every mapping of an experiment."""
    dimension_scores = tuple(
        score_dimension(m, stats, experiment.scalar) for m in experiment.mappings
    )
    subtotals = tuple(d.subtotal for d in dimension_scores)
    return SiteScore(
        site=site,
        dimension_scores=dimension_scores,
        total_raw=sum(subtotals),
        total_scaled=_scaled_total(subtotals, experiment.scale),
        experiment_id=experiment.id,
    )


def rescale(site_score: SiteScore, scale: ScaleVector) -> SiteScore:
    """Recompute the scaled total from existing subtotals.

    Dimension subtotals and the raw total are untouched, so a run can be
    re-scaled without re-ingesting any page.
    """
    return SiteScore(
        site=site_score.site,
        dimension_scores=site_score.dimension_scores,
        total_raw=site_score.total_raw,
        total_scaled=_scaled_total(site_score.subtotals, scale),
        experiment_id=site_score.experiment_id,
    )
