"""HTTP facade over scoring, storage, and analytics for the mapping studio.

Two static bearer-token roles: administrators may mutate experiments,
researchers may only launch runs and read.  Runs execute asynchronously on
a per-experiment worker so at most one run per experiment is in flight;
later submissions queue in arrival order.
"""

from __future__ import annotations

import queue
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import yaml
from fastapi import Body, Depends, FastAPI, Header, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import analytics, batch
from .analytics import (
    Advice,
    ContributionReport,
    GroundTruth,
    RankDiffReport,
    rank_by,
    rank_diff,
)
from .core import Experiment, ScaleVector
from .errors import OctoscoreError, UnknownExperiment, UnknownRun, ValidationError
from .ingest import DEFAULT_TIMEOUT
from .store import (
    ExperimentStore,
    RunRecord,
    experiment_from_dict,
    experiment_to_dict,
    new_run_id,
    run_to_dict,
    scores_csv_text,
)

ROLE_ADMINISTRATOR = "administrator"
ROLE_RESEARCHER = "researcher"


@dataclass(frozen=True)
class RoleTokens:
    administrator: frozenset[str]
    researcher: frozenset[str]

    def role_of(self, token: str) -> str | None:
        if token in self.administrator:
            return ROLE_ADMINISTRATOR
        if token in self.researcher:
            return ROLE_RESEARCHER
        return None

    @classmethod
    def from_file(cls, path: str | Path) -> "RoleTokens":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        return cls(
            administrator=frozenset(data.get("administrator", []) or []),
            researcher=frozenset(data.get("researcher", []) or []),
        )


def resolve_tokens(data_dir: Path, tokens_path: str | None) -> RoleTokens:
    """Load role tokens, generating a fresh token file on first start."""
    path = Path(tokens_path) if tokens_path else Path(data_dir) / "tokens.yaml"
    if path.exists():
        return RoleTokens.from_file(path)
    generated = {
        "administrator": [secrets.token_urlsafe(24)],
        "researcher": [secrets.token_urlsafe(24)],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(generated), encoding="utf-8")
    print(f"wrote new token file: {path}")
    print(f"  administrator: {generated['administrator'][0]}")
    print(f"  researcher:    {generated['researcher'][0]}")
    return RoleTokens.from_file(path)


# ---------------------------------------------------------------------------
# Background run execution
# ---------------------------------------------------------------------------

@dataclass
class _RunState:
    run_id: str
    experiment_id: str
    status: str  # "pending" | "done"
    record: RunRecord | None = None
    contributions: ContributionReport | None = None
    advices: list[Advice] | None = None
    rank_diff: RankDiffReport | None = None
    rank_diff_error: str | None = None
    suggested_scale: ScaleVector | None = None


class RunManager:
    """Executes runs one at a time per experiment, in submission order."""

    def __init__(
        self,
        store: ExperimentStore,
        offline: bool = False,
        timeout: float = DEFAULT_TIMEOUT,
        parallelism: int = batch.DEFAULT_PARALLELISM,
        relation_threshold: float = analytics.DEFAULT_RELATION_THRESHOLD,
        dimension_threshold: float = analytics.DEFAULT_DIMENSION_THRESHOLD,
    ):
        self.store = store
        self.offline = offline
        self.timeout = timeout
        self.parallelism = parallelism
        self.relation_threshold = relation_threshold
        self.dimension_threshold = dimension_threshold
        self._states: dict[str, _RunState] = {}
        self._queues: dict[str, queue.Queue] = {}
        self._lock = threading.Lock()

    def submit(
        self, experiment: Experiment, sites: list[str], truth: GroundTruth | None
    ) -> str:
        started = datetime.now(timezone.utc)
        run_id = new_run_id(experiment.id, started)
        state = _RunState(run_id=run_id, experiment_id=experiment.id, status="pending")
        with self._lock:
            self._states[run_id] = state
            work = self._queues.get(experiment.id)
            if work is None:
                work = queue.Queue()
                self._queues[experiment.id] = work
                worker = threading.Thread(
                    target=self._drain, args=(work,), daemon=True
                )
                worker.start()
        work.put((state, experiment, sites, truth, started))
        return run_id

    def _drain(self, work: queue.Queue) -> None:
        while True:
            state, experiment, sites, truth, started = work.get()
            try:
                self._execute(state, experiment, sites, truth, started)
            finally:
                work.task_done()

    def _execute(
        self,
        state: _RunState,
        experiment: Experiment,
        sites: list[str],
        truth: GroundTruth | None,
        started: datetime,
    ) -> None:
        scores, failures = batch.evaluate_many(
            experiment,
            sites,
            parallelism=self.parallelism,
            offline=self.offline,
            timeout=self.timeout,
        )
        record = RunRecord(
            run_id=state.run_id,
            experiment_id=experiment.id,
            started_at=started,
            site_scores=tuple(scores),
            failures=tuple(failures),
        )
        self.store.save_run(record)

        contributions = None
        advices = None
        suggested = None
        try:
            contributions = analytics.contribution_table(record.site_scores)
            advices = analytics.advise(
                record.site_scores,
                experiment,
                relation_dominance_threshold=self.relation_threshold,
                dimension_dominance_threshold=self.dimension_threshold,
            )
            suggested = analytics.suggest_scale(contributions)
        except OctoscoreError:
            pass

        diff_report = None
        diff_error = None
        if truth is not None and record.site_scores:
            try:
                run_sites = [s.site for s in record.site_scores]
                expected = truth.restricted_to(run_sites).ranking()
                actual = rank_by([(s.site, s.total_scaled) for s in record.site_scores])
                diff_report = rank_diff(expected, actual)
            except OctoscoreError as exc:
                diff_error = str(exc)

        with self._lock:
            state.record = record
            state.contributions = contributions
            state.advices = advices
            state.rank_diff = diff_report
            state.rank_diff_error = diff_error
            state.suggested_scale = suggested
            state.status = "done"

    def get(self, run_id: str) -> _RunState | None:
        with self._lock:
            return self._states.get(run_id)


# ---------------------------------------------------------------------------
# JSON rendering
# ---------------------------------------------------------------------------

def _rank_diff_json(report: RankDiffReport) -> dict[str, Any]:
    return {
        "per_site": [
            {
                "site": e.site,
                "expected_rank": e.expected_rank,
                "actual_rank": e.actual_rank,
                "abs_diff": e.abs_diff,
            }
            for e in report.per_site
        ],
        "mean_abs_diff": report.mean_abs_diff,
    }


def _contributions_json(report: ContributionReport) -> list[dict[str, Any]]:
    return [
        {
            "dimension": row.dimension.value,
            "attribute_count": row.attribute_count,
            "contribution_pct": row.contribution_pct,
            "std_dev": row.std_dev,
            "mean_subtotal": row.mean_subtotal,
        }
        for row in report.rows
    ]


def _advices_json(advices: list[Advice]) -> list[dict[str, Any]]:
    return [
        {
            "kind": a.kind.value,
            "dimension": a.dimension.value if a.dimension else None,
            "relation": a.relation,
            "value": a.value,
            "message": a.message,
        }
        for a in advices
    ]


class RunRequest(BaseModel):
    experiment_id: str
    sites: list[str]
    ground_truth_csv: str | None = None


# ---------------------------------------------------------------------------
# Application factory
# ---------------------------------------------------------------------------

def create_app(
    store: ExperimentStore,
    tokens: RoleTokens,
    offline: bool = False,
    timeout: float = DEFAULT_TIMEOUT,
    parallelism: int = batch.DEFAULT_PARALLELISM,
    relation_threshold: float = analytics.DEFAULT_RELATION_THRESHOLD,
    dimension_threshold: float = analytics.DEFAULT_DIMENSION_THRESHOLD,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="octoscore", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    manager = RunManager(
        store,
        offline=offline,
        timeout=timeout,
        parallelism=parallelism,
        relation_threshold=relation_threshold,
        dimension_threshold=dimension_threshold,
    )

    def current_role(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="bearer token required")
        role = tokens.role_of(authorization.removeprefix("Bearer ").strip())
        if role is None:
            raise HTTPException(status_code=401, detail="unknown token")
        return role

    def require_admin(role: str = Depends(current_role)) -> str:
        if role != ROLE_ADMINISTRATOR:
            raise HTTPException(status_code=403, detail="administrator role required")
        return role

    @app.get("/experiments")
    def list_experiments(role: str = Depends(current_role)):
        return [
            experiment_to_dict(store.load_experiment(experiment_id))
            for experiment_id in store.list_experiments()
        ]

    @app.get("/experiments/{experiment_id}")
    def get_experiment(experiment_id: str, role: str = Depends(current_role)):
        try:
            return experiment_to_dict(store.load_experiment(experiment_id))
        except UnknownExperiment as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.put("/experiments/{experiment_id}")
    def put_experiment(
        experiment_id: str,
        body: dict = Body(...),
        role: str = Depends(require_admin),
    ):
        data = dict(body)
        data.setdefault("id", experiment_id)
        if data["id"] != experiment_id:
            raise HTTPException(
                status_code=422,
                detail=f"body id {data['id']!r} does not match path id {experiment_id!r}",
            )
        try:
            experiment = experiment_from_dict(data)
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        store.save_experiment(experiment)
        return experiment_to_dict(experiment)

    @app.delete("/experiments/{experiment_id}")
    def delete_experiment(experiment_id: str, role: str = Depends(require_admin)):
        try:
            store.delete_experiment(experiment_id)
        except UnknownExperiment as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"deleted": experiment_id}

    @app.post("/runs", status_code=202)
    def post_run(request: RunRequest, role: str = Depends(current_role)):
        if not request.sites:
            raise HTTPException(status_code=422, detail="site list must be non-empty")
        try:
            experiment = store.load_experiment(request.experiment_id)
        except UnknownExperiment as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        truth = None
        if request.ground_truth_csv:
            try:
                truth = GroundTruth.from_csv_text(request.ground_truth_csv)
            except ValidationError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        run_id = manager.submit(experiment, list(request.sites), truth)
        return {"run_id": run_id, "status": "pending"}

    @app.get("/runs")
    def list_runs(experiment_id: str | None = None, role: str = Depends(current_role)):
        pending = []
        with manager._lock:
            for state in manager._states.values():
                if state.status == "pending" and (
                    experiment_id is None or state.experiment_id == experiment_id
                ):
                    pending.append(
                        {
                            "run_id": state.run_id,
                            "experiment_id": state.experiment_id,
                            "status": "pending",
                        }
                    )
        saved = [
            {
                "run_id": summary.run_id,
                "experiment_id": summary.experiment_id,
                "status": "done",
                "started_at": summary.started_at.isoformat(),
                "site_count": summary.site_count,
                "failure_count": summary.failure_count,
            }
            for summary in store.list_runs(experiment_id)
        ]
        return pending + saved

    def _load_done_state(run_id: str) -> _RunState:
        state = manager.get(run_id)
        if state is not None:
            return state
        # Runs recorded by the CLI or a previous process are served from disk.
        try:
            record = store.load_run(run_id)
        except UnknownRun as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        state = _RunState(
            run_id=run_id,
            experiment_id=record.experiment_id,
            status="done",
            record=record,
        )
        if record.site_scores:
            try:
                state.contributions = analytics.contribution_table(record.site_scores)
                experiment = store.load_experiment(record.experiment_id)
                state.advices = analytics.advise(record.site_scores, experiment)
                state.suggested_scale = analytics.suggest_scale(state.contributions)
            except OctoscoreError:
                pass
        return state

    @app.get("/runs/{run_id}")
    def get_run(run_id: str, role: str = Depends(current_role)):
        state = _load_done_state(run_id)
        if state.status == "pending":
            return {"run_id": run_id, "status": "pending"}
        record = state.record
        assert record is not None
        payload: dict[str, Any] = run_to_dict(record)
        payload["status"] = "done"
        payload["contributions"] = (
            _contributions_json(state.contributions) if state.contributions else None
        )
        payload["advices"] = _advices_json(state.advices) if state.advices else None
        payload["rank_diff"] = (
            _rank_diff_json(state.rank_diff) if state.rank_diff else None
        )
        payload["rank_diff_error"] = state.rank_diff_error
        payload["suggested_scale"] = (
            {
                "p": list(state.suggested_scale.p),
                "post_divisor": state.suggested_scale.post_divisor,
            }
            if state.suggested_scale
            else None
        )
        return payload

    @app.get("/runs/{run_id}/report.csv")
    def get_report(run_id: str, role: str = Depends(current_role)):
        state = _load_done_state(run_id)
        if state.status == "pending":
            return JSONResponse(
                status_code=409, content={"detail": f"run {run_id} is still pending"}
            )
        assert state.record is not None
        return Response(
            content=scores_csv_text(state.record),
            media_type="text/csv",
            headers={
                "Content-Disposition": f'attachment; filename="{run_id}-scores.csv"'
            },
        )

    return app
