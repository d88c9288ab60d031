"""octoscore: quantitative 8C heuristic evaluation of e-commerce landing pages."""

from .analytics import (
    Advice,
    AdviceKind,
    ContributionReport,
    ContributionRow,
    GroundTruth,
    GroundTruthEntry,
    RankDiffEntry,
    RankDiffReport,
    RankedSite,
    Ranking,
    advise,
    category_averages,
    contribution_table,
    rank_by,
    rank_diff,
    suggest_scale,
)
from .batch import evaluate_locator, evaluate_many
from .core import (
    DIMENSIONS,
    Dimension,
    DimensionScore,
    Experiment,
    Mapping,
    Relation,
    RelationKind,
    ScaleVector,
    SiteScore,
    rescale,
    score_dimension,
    score_relation,
    score_site,
)
from .errors import (
    DuplicateSite,
    EmptyDocument,
    EmptyRun,
    HttpError,
    MissingCategory,
    NetworkError,
    OctoscoreError,
    OfflineError,
    SiteSetMismatch,
    TooLarge,
    UnknownExperiment,
    UnknownRun,
    ValidationError,
    ZeroContribution,
    ZeroTotal,
)
from .ingest import (
    DocumentStats,
    PageSource,
    SourceKind,
    fetch_page,
    ingest_page,
    keyword_present,
    load_page,
    parse_stats,
)
from .store import ExperimentStore, RunRecord, RunSummary

__version__ = "0.1.0"

__all__ = [
    "Advice",
    "AdviceKind",
    "ContributionReport",
    "ContributionRow",
    "DIMENSIONS",
    "Dimension",
    "DimensionScore",
    "DocumentStats",
    "DuplicateSite",
    "EmptyDocument",
    "EmptyRun",
    "Experiment",
    "ExperimentStore",
    "GroundTruth",
    "GroundTruthEntry",
    "HttpError",
    "Mapping",
    "MissingCategory",
    "NetworkError",
    "OctoscoreError",
    "OfflineError",
    "PageSource",
    "RankDiffEntry",
    "RankDiffReport",
    "RankedSite",
    "Ranking",
    "Relation",
    "RelationKind",
    "RunRecord",
    "RunSummary",
    "ScaleVector",
    "SiteScore",
    "SiteSetMismatch",
    "SourceKind",
    "TooLarge",
    "UnknownExperiment",
    "UnknownRun",
    "ValidationError",
    "ZeroContribution",
    "ZeroTotal",
    "advise",
    "category_averages",
    "contribution_table",
    "evaluate_locator",
    "evaluate_many",
    "fetch_page",
    "ingest_page",
    "keyword_present",
    "load_page",
    "parse_stats",
    "rank_by",
    "rank_diff",
    "rescale",
    "score_dimension",
    "score_relation",
    "score_site",
    "suggest_scale",
]
