from __future__ import annotations

import math
from datetime import datetime, timedelta, timezone

import pytest
import yaml

from helpers import make_score
from octoscore import (
    DIMENSIONS,
    Experiment,
    Mapping,
    Relation,
    RelationKind,
    ScaleVector,
    UnknownExperiment,
    UnknownRun,
    ValidationError,
)
from octoscore.store import (
    ExperimentStore,
    RunRecord,
    experiment_from_dict,
    experiment_to_dict,
    new_run_id,
    parse_scores_csv,
    scores_csv_text,
)

NOW = datetime(2026, 8, 11, 12, 0, 0, tzinfo=timezone.utc)


def sample_run(run_id: str = "exp1-test-0001", with_failure: bool = False) -> RunRecord:
    failures = (("dead.example", "NetworkError: no route"),) if with_failure else ()
    return RunRecord(
        run_id=run_id,
        experiment_id="exp1",
        started_at=NOW,
        site_scores=(
            make_score("a.html", (1.25, 0, 2.5, 0, 0, 0, 0, 3.0), "exp1"),
            make_score("b.html", (0.5,) * 8, "exp1"),
        ),
        failures=failures,
    )


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def test_fresh_data_dir_is_seeded_with_defaults(store):
    assert store.list_experiments() == ["exp1", "exp6", "exp8"]


def test_seeding_happens_only_once(tmp_path):
    first = ExperimentStore(tmp_path / "data")
    first.delete_experiment("exp1")
    again = ExperimentStore(tmp_path / "data")
    assert "exp1" not in again.list_experiments()


def test_save_load_round_trip_for_shipped_experiments(store):
    for experiment_id in ("exp1", "exp6", "exp8"):
        original = store.load_experiment(experiment_id)
        store.save_experiment(original)
        assert store.load_experiment(experiment_id) == original


def test_save_load_round_trip_for_custom_experiment(store):
    experiment = Experiment(
        id="exp9",
        label="rebalanced",
        mappings=tuple(
            Mapping(d, (Relation(f"kw-{d.value}", RelationKind.KEYWORD, "word", 1.5),))
            for d in DIMENSIONS
        ),
        scale=ScaleVector(p=(1, 4, 4, 4, 4, 4, 3, 9), post_divisor=1),
        scalar=100.0,
        created_at=NOW,
    )
    store.save_experiment(experiment)
    assert store.load_experiment("exp9") == experiment


def test_load_unknown_experiment(store):
    with pytest.raises(UnknownExperiment):
        store.load_experiment("nope")


def test_file_with_seven_dimensions_is_invalid(store):
    data = experiment_to_dict(store.load_experiment("exp1"))
    del data["mappings"]["Commerce"]
    store.experiment_path("broken").write_text(yaml.safe_dump(data | {"id": "broken"}))
    with pytest.raises(ValidationError):
        store.load_experiment("broken")


def test_unknown_dimension_name_is_invalid(store):
    data = experiment_to_dict(store.load_experiment("exp1"))
    data["mappings"]["Conversation"] = data["mappings"].pop("Communication")
    store.experiment_path("broken").write_text(yaml.safe_dump(data | {"id": "broken"}))
    with pytest.raises(ValidationError):
        store.load_experiment("broken")


def test_negative_weight_is_invalid():
    data = {
        "id": "bad",
        "label": "",
        "mappings": {d.value: [] for d in DIMENSIONS},
    }
    data["mappings"]["Context"] = [
        {"name": "div", "kind": "tag", "pattern": "div", "weight": -2}
    ]
    with pytest.raises(ValidationError):
        experiment_from_dict(data)


def test_tag_patterns_are_lowercased_on_load():
    data = {
        "id": "ok",
        "label": "",
        "mappings": {d.value: [] for d in DIMENSIONS},
    }
    data["mappings"]["Context"] = [
        {"name": "div", "kind": "tag", "pattern": "DIV", "weight": 1}
    ]
    experiment = experiment_from_dict(data)
    assert experiment.mapping_for(DIMENSIONS[0]).relations[0].pattern == "div"


def test_garbage_yaml_is_invalid(store):
    store.experiment_path("broken").write_text("{{{ not yaml")
    with pytest.raises(ValidationError):
        store.load_experiment("broken")


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

def test_run_round_trip(store):
    run = sample_run(with_failure=True)
    store.save_run(run)
    assert store.load_run(run.run_id) == run


def test_load_unknown_run(store):
    with pytest.raises(UnknownRun):
        store.load_run("missing")


def test_run_rejects_site_in_both_lists():
    with pytest.raises(ValidationError):
        RunRecord(
            run_id="r",
            experiment_id="exp1",
            started_at=NOW,
            site_scores=(make_score("dup", (1.0,) * 8, "exp1"),),
            failures=(("dup", "boom"),),
        )


def test_list_runs_newest_first_and_filtered(store):
    older = RunRecord("exp1-old", "exp1", NOW - timedelta(hours=2), sample_run().site_scores)
    newer = RunRecord("exp1-new", "exp1", NOW, sample_run().site_scores)
    other = RunRecord("exp8-run", "exp8", NOW - timedelta(hours=1), ())
    for run in (older, newer, other):
        store.save_run(run)

    everything = store.list_runs()
    assert [summary.run_id for summary in everything] == ["exp1-new", "exp8-run", "exp1-old"]
    only_exp1 = store.list_runs("exp1")
    assert [summary.run_id for summary in only_exp1] == ["exp1-new", "exp1-old"]
    assert store.list_runs("expX") == []


def test_new_run_ids_are_unique():
    ids = {new_run_id("exp1", NOW) for _ in range(50)}
    assert len(ids) == 50


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def test_single_site_export_is_header_plus_row(store):
    run = RunRecord("one", "exp1", NOW, (make_score("solo", (1.0,) * 8, "exp1"),))
    paths = store.export_report(run)
    lines = paths["scores"].read_text().splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("site,sc_context,sc_content,")
    assert lines[0].endswith("total_raw,total_scaled")


def test_failures_go_to_their_own_section(store):
    run = sample_run(with_failure=True)
    paths = store.export_report(run)
    text = paths["scores"].read_text()
    rows, failures = parse_scores_csv(text)
    assert [row["site"] for row in rows] == ["a.html", "b.html"]
    assert failures == [("dead.example", "NetworkError: no route")]
    assert "dead.example" not in text.split("failures")[0]


def test_export_round_trip_recovers_values_to_four_decimals(store):
    run = sample_run()
    paths = store.export_report(run)
    rows, _ = parse_scores_csv(paths["scores"].read_text())
    for row, score in zip(rows, run.site_scores):
        expected = [*score.subtotals, score.total_raw, score.total_scaled]
        for parsed, original in zip(row["values"], expected):
            assert math.isclose(parsed, original, abs_tol=5.1e-5)


def test_export_is_byte_stable(store, tmp_path):
    run = sample_run(with_failure=True)
    first = store.export_report(run, out_dir=tmp_path / "one")
    second = store.export_report(run, out_dir=tmp_path / "two")
    assert first["scores"].read_bytes() == second["scores"].read_bytes()


def test_scores_csv_uses_lf_and_utf8(store):
    run = RunRecord("lf", "exp1", NOW, (make_score("café.html", (1.0,) * 8, "exp1"),))
    text = scores_csv_text(run)
    assert "\r" not in text
    assert "café.html" in text
    path = store.export_report(run)["scores"]
    assert b"\r" not in path.read_bytes()
    assert "café".encode("utf-8") in path.read_bytes()
