"""Command-line workflow: evaluate, batch, compare, advise, manage experiments."""

from __future__ import annotations

import argparse
import sys
import traceback
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from . import analytics, batch
from .analytics import GroundTruth, advise, contribution_table, rank_by, rank_diff
from .core import DIMENSIONS, Experiment, ScaleVector, SiteScore
from .errors import OctoscoreError, SiteSetMismatch
from .ingest import DEFAULT_TIMEOUT, DEFAULT_USER_AGENT, is_url
from .store import ExperimentStore, RunRecord, new_run_id

EXIT_OK = 0
EXIT_USER = 2
EXIT_INTERNAL = 3


@dataclass(frozen=True)
class CliConfig:
    data_dir: str | None
    fetch_timeout: float
    fetch_parallelism: int
    offline_mode: bool
    relation_threshold: float
    dimension_threshold: float
    user_agent: str = DEFAULT_USER_AGENT

    def __post_init__(self) -> None:
        if self.fetch_timeout <= 0:
            raise ValueError("--timeout must be > 0")
        if self.fetch_parallelism < 1:
            raise ValueError("--parallelism must be >= 1")


def _config(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        data_dir=args.data_dir,
        fetch_timeout=args.timeout,
        fetch_parallelism=args.parallelism,
        offline_mode=args.offline,
        relation_threshold=args.relation_threshold,
        dimension_threshold=args.dimension_threshold,
    )


def _store(config: CliConfig) -> ExperimentStore:
    return ExperimentStore(config.data_dir)


def _print_score(score: SiteScore) -> None:
    width = max(len(d.value) for d in DIMENSIONS) + 2
    print(f"site: {score.site}")
    print(f"experiment: {score.experiment_id}")
    print()
    print(f"{'dimension'.ljust(width)}subtotal")
    for dim_score in score.dimension_scores:
        print(f"{dim_score.dimension.value.ljust(width)}{dim_score.subtotal:.4f}")
    print()
    print(f"{'total_raw'.ljust(width)}{score.total_raw:.4f}")
    print(f"{'total_scaled'.ljust(width)}{score.total_scaled:.4f}")


def _new_run(
    experiment: Experiment,
    scores: list[SiteScore],
    failures: list[tuple[str, str]],
) -> RunRecord:
    started = datetime.now(timezone.utc)
    return RunRecord(
        run_id=new_run_id(experiment.id, started),
        experiment_id=experiment.id,
        started_at=started,
        site_scores=tuple(scores),
        failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _config(args)
    store = _store(config)
    experiment = store.load_experiment(args.experiment_id)
    score = batch.evaluate_locator(
        experiment,
        args.locator,
        offline=config.offline_mode,
        timeout=config.fetch_timeout,
        user_agent=config.user_agent,
    )
    _print_score(score)
    run = _new_run(experiment, [score], [])
    store.save_run(run)
    print()
    print(f"run saved: {run.run_id}")
    return EXIT_OK


def _read_site_list(path: str) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    sites = []
    for line in lines:
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            sites.append(stripped)
    return sites


def cmd_batch(args: argparse.Namespace) -> int:
    config = _config(args)
    store = _store(config)
    experiment = store.load_experiment(args.experiment_id)
    sites = _read_site_list(args.list_file)
    if not sites:
        print(f"error: no sites in list file {args.list_file}", file=sys.stderr)
        return EXIT_USER

    scores, failures = batch.evaluate_many(
        experiment,
        sites,
        parallelism=config.fetch_parallelism,
        offline=config.offline_mode,
        timeout=config.fetch_timeout,
        user_agent=config.user_agent,
    )
    if not scores:
        print("error: every site in the batch failed", file=sys.stderr)
        for site, error in failures:
            print(f"  {site}: {error}", file=sys.stderr)
        return EXIT_USER

    run = _new_run(experiment, scores, failures)
    store.save_run(run)
    contributions = None
    try:
        contributions = contribution_table(run.site_scores)
    except OctoscoreError as exc:
        print(f"note: contribution table skipped ({exc})", file=sys.stderr)
    written = store.export_report(run, contributions=contributions)

    print(f"run: {run.run_id}")
    print(f"scored {len(scores)} site(s), {len(failures)} failure(s)")
    for site, error in failures:
        print(f"  failed: {site}: {error}")
    for name, path in written.items():
        print(f"{name}: {path}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = _config(args)
    store = _store(config)
    run = store.load_run(args.run_id)
    truth = GroundTruth.from_csv(args.truth_csv)

    run_sites = [score.site for score in run.site_scores]
    missing = sorted(set(run_sites) - {e.site for e in truth.entries})
    if missing:
        raise SiteSetMismatch(f"ground truth is missing run site(s): {missing}")
    expected = truth.restricted_to(run_sites).ranking()
    actual = rank_by([(score.site, score.total_scaled) for score in run.site_scores])
    report = rank_diff(expected, actual)

    width = max((len(e.site) for e in report.per_site), default=4) + 2
    print(f"{'site'.ljust(width)}expected  actual  |diff|")
    for entry in report.per_site:
        print(
            f"{entry.site.ljust(width)}"
            f"{str(entry.expected_rank).ljust(10)}"
            f"{str(entry.actual_rank).ljust(8)}"
            f"{entry.abs_diff}"
        )
    print()
    print(f"mean abs rank difference: {report.mean_abs_diff:.4f}")
    store.export_report(run, rank_diff=report)
    return EXIT_OK


def cmd_advise(args: argparse.Namespace) -> int:
    config = _config(args)
    store = _store(config)
    run = store.load_run(args.run_id)
    experiment = store.load_experiment(run.experiment_id)
    advices = advise(
        run.site_scores,
        experiment,
        relation_dominance_threshold=config.relation_threshold,
        dimension_dominance_threshold=config.dimension_threshold,
    )
    for advice in advices:
        print(f"[{advice.kind.value}] {advice.message}")
    return EXIT_OK


def cmd_runs(args: argparse.Namespace) -> int:
    config = _config(args)
    store = _store(config)
    summaries = store.list_runs(args.experiment)
    if not summaries:
        print("no runs recorded")
        return EXIT_OK
    for summary in summaries:
        print(
            f"{summary.run_id}  experiment={summary.experiment_id}  "
            f"sites={summary.site_count}  failures={summary.failure_count}  "
            f"started={summary.started_at.isoformat()}"
        )
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _config(args)
    store = _store(config)

    if args.action == "list":
        for experiment_id in store.list_experiments():
            experiment = store.load_experiment(experiment_id)
            print(f"{experiment_id}  {experiment.label}")
        return EXIT_OK

    if args.action == "show":
        experiment = store.load_experiment(args.id)
        print(f"experiment: {experiment.id}  ({experiment.label})")
        print(f"scalar: {experiment.scalar}")
        p_text = ", ".join(f"{x:g}" for x in experiment.scale.p)
        print(f"scale: p=[{p_text}]  post_divisor={experiment.scale.post_divisor:g}")
        for mapping in experiment.mappings:
            print()
            print(f"{mapping.dimension.value} ({len(mapping.relations)} relations)")
            for relation in mapping.relations:
                print(
                    f"  {relation.name.ljust(24)}{relation.kind.value.ljust(9)}"
                    f"{relation.pattern.ljust(20)}{relation.weight:g}"
                )
        return EXIT_OK

    if args.action == "copy":
        source = store.load_experiment(args.src)
        if store.has_experiment(args.dst):
            print(f"error: experiment {args.dst!r} already exists", file=sys.stderr)
            return EXIT_USER
        scale = source.scale
        if args.post_divisor is not None:
            scale = ScaleVector(p=scale.p, post_divisor=args.post_divisor)
        clone = Experiment(
            id=args.dst,
            label=args.label if args.label is not None else source.label,
            mappings=source.mappings,
            scale=scale,
            scalar=source.scalar,
            created_at=datetime.now(timezone.utc),
        )
        store.save_experiment(clone)
        print(f"created {args.dst} from {args.src}")
        return EXIT_OK

    if args.action == "set-scale":
        experiment = store.load_experiment(args.id)
        p = tuple(args.p) if args.p is not None else experiment.scale.p
        divisor = (
            args.post_divisor
            if args.post_divisor is not None
            else experiment.scale.post_divisor
        )
        updated = replace(experiment, scale=ScaleVector(p=p, post_divisor=divisor))
        store.save_experiment(updated)
        print(f"updated scale for {experiment.id}")
        return EXIT_OK

    raise AssertionError(f"unhandled experiment action {args.action!r}")


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app, resolve_tokens

    config = _config(args)
    store = _store(config)
    tokens = resolve_tokens(store.data_dir, args.tokens)
    app = create_app(
        store,
        tokens,
        offline=config.offline_mode,
        timeout=config.fetch_timeout,
        parallelism=config.fetch_parallelism,
        relation_threshold=config.relation_threshold,
        dimension_threshold=config.dimension_threshold,
    )
    host, _, port_text = args.listen.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port_text or "8470"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="octoscore",
        description="Quantitative 8C heuristic evaluation of e-commerce landing pages.",
    )
    parser.add_argument("--data-dir", default=None, help="data directory (default ./octoscore-data, env OCTOSCORE_DATA)")
    parser.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="fetch timeout in seconds")
    parser.add_argument("--parallelism", type=int, default=batch.DEFAULT_PARALLELISM, help="parallel fetch limit")
    parser.add_argument("--offline", action="store_true", help="refuse to fetch URLs; local files only")
    parser.add_argument(
        "--relation-threshold",
        type=float,
        default=analytics.DEFAULT_RELATION_THRESHOLD,
        help="mean share above which a relation dominates its dimension",
    )
    parser.add_argument(
        "--dimension-threshold",
        type=float,
        default=analytics.DEFAULT_DIMENSION_THRESHOLD,
        help="contribution share above which a dimension dominates the total",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("evaluate", help="score one site against an experiment")
    evaluate.add_argument("experiment_id")
    evaluate.add_argument("locator", help="URL or local HTML file")
    evaluate.set_defaults(func=cmd_evaluate)

    batch_cmd = commands.add_parser("batch", help="score every site in a list file")
    batch_cmd.add_argument("experiment_id")
    batch_cmd.add_argument("list_file", help="one URL/file per line; # comments and blanks ignored")
    batch_cmd.set_defaults(func=cmd_batch)

    compare = commands.add_parser("compare", help="rank a run against conversion-rate ground truth")
    compare.add_argument("run_id")
    compare.add_argument("truth_csv", help="CSV with header site,cr[,category]")
    compare.set_defaults(func=cmd_compare)

    advise_cmd = commands.add_parser("advise", help="mapping-revision advice for a recorded run")
    advise_cmd.add_argument("run_id")
    advise_cmd.set_defaults(func=cmd_advise)

    runs = commands.add_parser("runs", help="list recorded runs, newest first")
    runs.add_argument("--experiment", default=None, help="only runs for this experiment id")
    runs.set_defaults(func=cmd_runs)

    experiment = commands.add_parser("experiment", help="manage stored experiments")
    actions = experiment.add_subparsers(dest="action", required=True)

    exp_list = actions.add_parser("list", help="list experiment ids")
    exp_list.set_defaults(func=cmd_experiment)

    exp_show = actions.add_parser("show", help="print one experiment's mapping table")
    exp_show.add_argument("id")
    exp_show.set_defaults(func=cmd_experiment)

    exp_copy = actions.add_parser("copy", help="clone an experiment to start the next revision")
    exp_copy.add_argument("src")
    exp_copy.add_argument("dst")
    exp_copy.add_argument("--post-divisor", type=float, default=None)
    exp_copy.add_argument("--label", default=None)
    exp_copy.set_defaults(func=cmd_experiment)

    exp_scale = actions.add_parser("set-scale", help="update an experiment's scale vector")
    exp_scale.add_argument("id")
    exp_scale.add_argument("--p", type=float, nargs=8, default=None, metavar="P")
    exp_scale.add_argument("--post-divisor", type=float, default=None)
    exp_scale.set_defaults(func=cmd_experiment)

    serve = commands.add_parser("serve", help="run the HTTP API for the mapping studio")
    serve.add_argument("--listen", default="127.0.0.1:8470", help="host:port to bind")
    serve.add_argument("--tokens", default=None, help="YAML file with administrator/researcher tokens")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OctoscoreError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
