"""Persistence for experiments, runs, and exported CSV reports.

Experiments live as one YAML file each under ``<data_dir>/experiments`` so
the revision loop can be driven from an editor as easily as from the API.
Runs are append-only JSON files under ``<data_dir>/runs``.  All writes are
atomic (write to a temp file, then rename), so concurrent readers never see
a half-written file.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib.resources import files as package_files
from pathlib import Path
from typing import Any

import yaml

from .analytics import ContributionReport, RankDiffReport
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
)
from .errors import UnknownExperiment, UnknownRun, ValidationError

DEFAULT_DATA_DIR = "./octoscore-data"
DATA_DIR_ENV = "OCTOSCORE_DATA"

SCORE_COLUMNS = (
    "site",
    *(f"sc_{d.value.lower()}" for d in DIMENSIONS),
    "total_raw",
    "total_scaled",
)

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class RunRecord:
    """One evaluation batch: scores for the sites that worked, errors for
    the rest.  A site never appears in both lists."""

    run_id: str
    experiment_id: str
    started_at: datetime
    site_scores: tuple[SiteScore, ...]
    failures: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "site_scores", tuple(self.site_scores))
        object.__setattr__(self, "failures", tuple(tuple(f) for f in self.failures))
        scored = [s.site for s in self.site_scores]
        failed = [site for site, _ in self.failures]
        everything = scored + failed
        if len(everything) != len(set(everything)):
            raise ValidationError(
                f"run {self.run_id!r}: each site must appear exactly once"
            )


@dataclass(frozen=True)
class RunSummary:
    run_id: str
    experiment_id: str
    started_at: datetime
    site_count: int
    failure_count: int


# ---------------------------------------------------------------------------
# Experiment <-> dict codec (shared by the YAML files and the HTTP API)
# ---------------------------------------------------------------------------

def experiment_to_dict(experiment: Experiment) -> dict[str, Any]:
    return {
        "id": experiment.id,
        "label": experiment.label,
        "scalar": experiment.scalar,
        "scale": {
            "p": list(experiment.scale.p),
            "post_divisor": experiment.scale.post_divisor,
        },
        "created_at": experiment.created_at.isoformat(),
        "mappings": {
            mapping.dimension.value: [
                {
                    "name": relation.name,
                    "kind": relation.kind.value,
                    "pattern": relation.pattern,
                    "weight": relation.weight,
                }
                for relation in mapping.relations
            ]
            for mapping in experiment.mappings
        },
    }


def experiment_from_dict(data: Any) -> Experiment:
    """Build an Experiment from parsed YAML/JSON, validating as we go.

    Tag patterns are lowercased on the way in; every other schema breach
    raises :class:`ValidationError` with a pointer to the offending field.
    """
    if not isinstance(data, dict):
        raise ValidationError("experiment document must be a mapping")

    experiment_id = data.get("id")
    if not isinstance(experiment_id, str) or not experiment_id:
        raise ValidationError("experiment 'id' must be a non-empty string")
    label = data.get("label", "")
    if not isinstance(label, str):
        raise ValidationError("experiment 'label' must be a string")

    scalar = data.get("scalar", 100)
    if not isinstance(scalar, (int, float)) or isinstance(scalar, bool):
        raise ValidationError("experiment 'scalar' must be a number")

    scale_data = data.get("scale") or {}
    if not isinstance(scale_data, dict):
        raise ValidationError("'scale' must hold 'p' and 'post_divisor'")
    p = scale_data.get("p", [1] * len(DIMENSIONS))
    post_divisor = scale_data.get("post_divisor", 1)
    if not isinstance(p, (list, tuple)) or len(p) != len(DIMENSIONS):
        raise ValidationError(f"'scale.p' must list {len(DIMENSIONS)} numbers")
    try:
        scale = ScaleVector(p=tuple(float(x) for x in p), post_divisor=float(post_divisor))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad scale: {exc}") from exc

    raw_created = data.get("created_at")
    if raw_created is None:
        created_at = _EPOCH
    elif isinstance(raw_created, datetime):
        created_at = raw_created
    else:
        try:
            created_at = datetime.fromisoformat(str(raw_created))
        except ValueError as exc:
            raise ValidationError(f"bad created_at: {raw_created!r}") from exc

    mappings_data = data.get("mappings")
    if not isinstance(mappings_data, dict):
        raise ValidationError("'mappings' must map dimension names to relation lists")
    known = {d.value: d for d in DIMENSIONS}
    unknown = [name for name in mappings_data if name not in known]
    if unknown:
        raise ValidationError(f"unknown dimension name(s): {sorted(unknown)}")
    missing = [name for name in known if name not in mappings_data]
    if missing:
        raise ValidationError(f"missing mappings for dimension(s): {missing}")

    mappings = []
    for name, relations_data in mappings_data.items():
        if not isinstance(relations_data, list):
            raise ValidationError(f"mapping for {name} must be a list of relations")
        relations = []
        for item in relations_data:
            if not isinstance(item, dict):
                raise ValidationError(f"relation entries under {name} must be mappings")
            try:
                kind = RelationKind(str(item.get("kind", "")).lower())
            except ValueError:
                raise ValidationError(
                    f"relation {item.get('name')!r} under {name}: kind must be "
                    f"'tag' or 'keyword', got {item.get('kind')!r}"
                )
            pattern = str(item.get("pattern", ""))
            if kind is RelationKind.TAG:
                pattern = pattern.strip().lower()
            weight = item.get("weight")
            if not isinstance(weight, (int, float)) or isinstance(weight, bool):
                raise ValidationError(
                    f"relation {item.get('name')!r} under {name}: weight must be a number"
                )
            try:
                relations.append(
                    Relation(
                        name=str(item.get("name", "")),
                        kind=kind,
                        pattern=pattern,
                        weight=float(weight),
                    )
                )
            except ValueError as exc:
                raise ValidationError(str(exc)) from exc
        try:
            mappings.append(Mapping(dimension=known[name], relations=tuple(relations)))
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    try:
        return Experiment(
            id=experiment_id,
            label=label,
            mappings=tuple(mappings),
            scale=scale,
            scalar=float(scalar),
            created_at=created_at,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


# ---------------------------------------------------------------------------
# SiteScore / RunRecord <-> dict codec
# ---------------------------------------------------------------------------

def site_score_to_dict(score: SiteScore) -> dict[str, Any]:
    return {
        "site": score.site,
        "experiment_id": score.experiment_id,
        "total_raw": score.total_raw,
        "total_scaled": score.total_scaled,
        "dimensions": [
            {
                "dimension": d.dimension.value,
                "subtotal": d.subtotal,
                "relation_scores": [[name, value] for name, value in d.relation_scores],
            }
            for d in score.dimension_scores
        ],
    }


def site_score_from_dict(data: dict[str, Any]) -> SiteScore:
    try:
        dimension_scores = tuple(
            DimensionScore(
                dimension=Dimension(d["dimension"]),
                relation_scores=tuple((str(n), float(v)) for n, v in d["relation_scores"]),
                subtotal=float(d["subtotal"]),
            )
            for d in data["dimensions"]
        )
        return SiteScore(
            site=str(data["site"]),
            dimension_scores=dimension_scores,
            total_raw=float(data["total_raw"]),
            total_scaled=float(data["total_scaled"]),
            experiment_id=str(data["experiment_id"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad site score record: {exc}") from exc


def run_to_dict(run: RunRecord) -> dict[str, Any]:
    return {
        "run_id": run.run_id,
        "experiment_id": run.experiment_id,
        "started_at": run.started_at.isoformat(),
        "site_scores": [site_score_to_dict(s) for s in run.site_scores],
        "failures": [[site, error] for site, error in run.failures],
    }


def run_from_dict(data: dict[str, Any]) -> RunRecord:
    try:
        return RunRecord(
            run_id=str(data["run_id"]),
            experiment_id=str(data["experiment_id"]),
            started_at=datetime.fromisoformat(str(data["started_at"])),
            site_scores=tuple(site_score_from_dict(s) for s in data["site_scores"]),
            failures=tuple((str(s), str(e)) for s, e in data.get("failures", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad run record: {exc}") from exc


def new_run_id(experiment_id: str, started_at: datetime) -> str:
    stamp = started_at.strftime("%Y%m%dT%H%M%S")
    return f"{experiment_id}-{stamp}-{uuid.uuid4().hex[:8]}"


# ---------------------------------------------------------------------------
# CSV report rendering
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.4f}"


def scores_csv_text(run: RunRecord) -> str:
    """Scores CSV for one run; failed sites go into a trailing section.

    The output is fully determined by the scores themselves (no run ids or
    timestamps), so re-running the same corpus reproduces identical bytes.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCORE_COLUMNS)
    for score in run.site_scores:
        writer.writerow(
            [
                score.site,
                *(_fmt(sub) for sub in score.subtotals),
                _fmt(score.total_raw),
                _fmt(score.total_scaled),
            ]
        )
    if run.failures:
        writer.writerow([])
        writer.writerow(["failures"])
        writer.writerow(["site", "error"])
        for site, error in run.failures:
            writer.writerow([site, error])
    return buffer.getvalue()


def rank_diff_csv_text(report: RankDiffReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["site", "expected_rank", "actual_rank", "abs_diff"])
    for entry in report.per_site:
        writer.writerow([entry.site, entry.expected_rank, entry.actual_rank, entry.abs_diff])
    writer.writerow(["mean_abs_diff", "", "", _fmt(report.mean_abs_diff)])
    return buffer.getvalue()


def contributions_csv_text(report: ContributionReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["dimension", "attribute_count", "contribution_pct", "std_dev", "mean_subtotal"]
    )
    for row in report.rows:
        writer.writerow(
            [
                row.dimension.value,
                row.attribute_count,
                _fmt(row.contribution_pct),
                _fmt(row.std_dev),
                _fmt(row.mean_subtotal),
            ]
        )
    return buffer.getvalue()


def parse_scores_csv(text: str) -> tuple[list[dict[str, Any]], list[tuple[str, str]]]:
    """Read a scores CSV back into rows + failures (the export round-trip)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SCORE_COLUMNS:
        raise ValidationError(f"unexpected scores header: {header}")
    rows: list[dict[str, Any]] = []
    failures: list[tuple[str, str]] = []
    in_failures = False
    for record in reader:
        if not record:
            continue
        if record == ["failures"]:
            in_failures = True
            next(reader, None)  # skip the site,error header
            continue
        if in_failures:
            failures.append((record[0], record[1]))
        else:
            rows.append(
                {
                    "site": record[0],
                    "values": [float(x) for x in record[1:]],
                }
            )
    return rows, failures


# ---------------------------------------------------------------------------
# The store itself
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(temp_name, path)
    except BaseException:
        try:
            os.unlink(temp_name)
        except OSError:
            pass
        raise


class ExperimentStore:
    """File-backed store rooted at a data directory.

    The directory defaults to ``./octoscore-data`` and can be overridden by
    the ``OCTOSCORE_DATA`` environment variable or an explicit argument.  A
    fresh directory is seeded with the shipped default experiments.
    """

    def __init__(self, data_dir: str | Path | None = None, seed_defaults: bool = True):
        if data_dir is None:
            data_dir = os.environ.get(DATA_DIR_ENV) or DEFAULT_DATA_DIR
        self.data_dir = Path(data_dir)
        self.experiments_dir = self.data_dir / "experiments"
        self.runs_dir = self.data_dir / "runs"
        self.reports_dir = self.data_dir / "reports"
        if seed_defaults and not self.experiments_dir.exists():
            self._seed_defaults()
        for directory in (self.experiments_dir, self.runs_dir, self.reports_dir):
            directory.mkdir(parents=True, exist_ok=True)

    def _seed_defaults(self) -> None:
        source = package_files("octoscore").joinpath("data/experiments")
        self.experiments_dir.mkdir(parents=True, exist_ok=True)
        for resource in source.iterdir():
            if resource.name.endswith(".yaml"):
                _atomic_write(
                    self.experiments_dir / resource.name,
                    resource.read_text(encoding="utf-8"),
                )

    # -- experiments --------------------------------------------------

    def experiment_path(self, experiment_id: str) -> Path:
        return self.experiments_dir / f"{experiment_id}.yaml"

    def list_experiments(self) -> list[str]:
        return sorted(p.stem for p in self.experiments_dir.glob("*.yaml"))

    def has_experiment(self, experiment_id: str) -> bool:
        return self.experiment_path(experiment_id).exists()

    def load_experiment(self, experiment_id: str) -> Experiment:
        path = self.experiment_path(experiment_id)
        if not path.exists():
            raise UnknownExperiment(f"unknown experiment {experiment_id!r}")
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ValidationError(f"{path.name}: not valid YAML: {exc}") from exc
        experiment = experiment_from_dict(data)
        if experiment.id != experiment_id:
            raise ValidationError(
                f"{path.name}: file id {experiment.id!r} does not match {experiment_id!r}"
            )
        return experiment

    def save_experiment(self, experiment: Experiment) -> Path:
        path = self.experiment_path(experiment.id)
        text = yaml.safe_dump(
            experiment_to_dict(experiment), sort_keys=False, allow_unicode=True
        )
        _atomic_write(path, text)
        return path

    def delete_experiment(self, experiment_id: str) -> None:
        path = self.experiment_path(experiment_id)
        if not path.exists():
            raise UnknownExperiment(f"unknown experiment {experiment_id!r}")
        path.unlink()

    # -- runs ----------------------------------------------------------

    def run_path(self, run_id: str) -> Path:
        return self.runs_dir / f"{run_id}.json"

    def save_run(self, run: RunRecord) -> Path:
        path = self.run_path(run.run_id)
        _atomic_write(path, json.dumps(run_to_dict(run), indent=2) + "\n")
        return path

    def load_run(self, run_id: str) -> RunRecord:
        path = self.run_path(run_id)
        if not path.exists():
            raise UnknownRun(f"unknown run {run_id!r}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path.name}: not valid JSON: {exc}") from exc
        return run_from_dict(data)

    def list_runs(self, experiment_id: str | None = None) -> list[RunSummary]:
        summaries = []
        for path in self.runs_dir.glob("*.json"):
            try:
                run = run_from_dict(json.loads(path.read_text(encoding="utf-8")))
            except (ValidationError, json.JSONDecodeError):
                continue
            if experiment_id is not None and run.experiment_id != experiment_id:
                continue
            summaries.append(
                RunSummary(
                    run_id=run.run_id,
                    experiment_id=run.experiment_id,
                    started_at=run.started_at,
                    site_count=len(run.site_scores),
                    failure_count=len(run.failures),
                )
            )
        summaries.sort(key=lambda s: (s.started_at, s.run_id), reverse=True)
        return summaries

    # -- reports ---------------------------------------------------------

    def export_report(
        self,
        run: RunRecord,
        rank_diff: RankDiffReport | None = None,
        contributions: ContributionReport | None = None,
        out_dir: str | Path | None = None,
    ) -> dict[str, Path]:
        """Write the run's CSV reports and return their paths.

        Always writes ``scores.csv``; ``rank_diff.csv`` and
        ``contributions.csv`` are written when the corresponding report is
        supplied.  Exports are stable: the same inputs produce byte-identical
        files.
        """
        target = Path(out_dir) if out_dir is not None else self.reports_dir / run.run_id
        target.mkdir(parents=True, exist_ok=True)
        written: dict[str, Path] = {}

        scores_path = target / "scores.csv"
        _atomic_write(scores_path, scores_csv_text(run))
        written["scores"] = scores_path

        if rank_diff is not None:
            path = target / "rank_diff.csv"
            _atomic_write(path, rank_diff_csv_text(rank_diff))
            written["rank_diff"] = path
        if contributions is not None:
            path = target / "contributions.csv"
            _atomic_write(path, contributions_csv_text(contributions))
            written["contributions"] = path
        return written
