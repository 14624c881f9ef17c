"""Command-line interface for the AP-selection pipeline.

Subcommands: ``gen-synthetic``, ``stats``, ``solve``, ``auto``, ``sweep``,
``evaluate``, ``bench``. Global flags (before the subcommand): ``--config``
(JSON file; flags override it), ``--seed``, ``--threads``, ``--out``,
``--mode``. Exit codes: 0 success, 2 config error, 3 data error, 4 solver
error, 5 localizer error.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click
import numpy as np

from . import pipeline
from .dataset import (
    DEFAULT_BINS,
    DEFAULT_RSS_MAX,
    DEFAULT_RSS_MIN,
    DEFAULT_SENTINEL,
    DEFAULT_TEST_FRACTION,
    CsvSchema,
    discretize,
    load_fingerprint,
    reduce,
    save_fingerprint,
    split,
)
from .errors import ApselError, ConfigError
from .locate import ClassifierSpec, evaluate as evaluate_classifier, train
from .qubo import QuboInstance, build_matrix, write_matrix_csv, write_matrix_triplets
from .search import MODES, SearchConfig
from .solver import AnnealConfig, make_solver, solver_names
from .stats import importance_vector, redundancy_matrix
from .synthetic import generate_synthetic


class Settings:
    """Layered option resolution: explicit flag > config file > default."""

    def __init__(self, config: dict):
        self._config = config or {}

    def get(self, flag, path: str, default=None):
        if flag is not None:
            return flag
        node = self._config
        for part in path.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node if node is not None else default


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return cfg


def _parse_pair(text: str, what: str, sep: str) -> tuple[float, float]:
    parts = text.split(sep)
    if len(parts) != 2:
        raise ConfigError(f"{what} must be two values separated by {sep!r}, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"cannot parse {what} from {text!r}") from exc


def guarded(fn):
    """Map package errors to their exit codes; honor the --threads cap."""

    @functools.wraps(fn)
    def wrapper(ctx, *args, **kwargs):
        threads = ctx.obj["threads"]
        try:
            if threads:
                from threadpoolctl import threadpool_limits

                with threadpool_limits(limits=threads):
                    return fn(ctx, *args, **kwargs)
            return fn(ctx, *args, **kwargs)
        except ApselError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


@click.group()
@click.version_option(package_name="apsel")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; explicit flags override its values.")
@click.option("--seed", type=int, default=None, help="Seed for every stochastic component.")
@click.option("--threads", type=int, default=None, help="Cap on numeric-library parallelism.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Output directory for artifacts (default apsel-run).")
@click.option("--mode", type=click.Choice(MODES), default=None,
              help="Search termination mode for auto/bench.")
@click.pass_context
def main(ctx, config_path, seed, threads, out_dir, mode):
    """Select a minimal informative AP subset from an RSS fingerprint."""
    try:
        config = _load_config(config_path)
    except ApselError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.exit_code)
    settings = Settings(config)
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings
    ctx.obj["seed"] = int(settings.get(seed, "seed", 0))
    ctx.obj["threads"] = settings.get(threads, "threads", None)
    ctx.obj["out"] = settings.get(out_dir, "out", "apsel-run")
    ctx.obj["mode"] = settings.get(mode, "search.mode", "robust")


def dataset_options(fn):
    fn = click.option("--rss-range", default=None,
                      help=f"Declared RSS range MIN,MAX (default {DEFAULT_RSS_MIN},{DEFAULT_RSS_MAX}).")(fn)
    fn = click.option("--sentinel", type=float, default=None,
                      help=f"Not-detected marker value (default {DEFAULT_SENTINEL}).")(fn)
    fn = click.option("--floor-column", default=None, help="Floor label column name (default FLOOR).")(fn)
    fn = click.option("--rss-columns", default=None,
                      help="Explicit half-open header index range START:STOP for RSS columns.")(fn)
    fn = click.option("--rss-prefix", default=None, help="RSS column header prefix (default WAP).")(fn)
    fn = click.option("--data", "data_path", type=click.Path(), default=None,
                      help="Fingerprint CSV path.")(fn)
    return fn


def solver_options(fn):
    fn = click.option("--sa-cooling", type=float, default=None, help="SA cooling rate per sweep.")(fn)
    fn = click.option("--sa-t0", type=float, default=None, help="SA initial temperature (default auto).")(fn)
    fn = click.option("--sa-restarts", type=int, default=None, help="SA restart count.")(fn)
    fn = click.option("--sa-sweeps", type=int, default=None, help="SA sweeps per restart.")(fn)
    fn = click.option("--solver", default=None, type=click.Choice(solver_names()),
                      help="QUBO solver (default sa).")(fn)
    return fn


def classifier_options(fn):
    fn = click.option("--forest-depth", type=int, default=None, help="Random-forest depth cap.")(fn)
    fn = click.option("--forest-trees", type=int, default=None, help="Random-forest tree count.")(fn)
    fn = click.option("--knn-k", type=int, default=None, help="Neighbor count for knn.")(fn)
    fn = click.option("--classifier", default=None, type=click.Choice(["knn", "forest"]),
                      help="Accuracy-oracle classifier (default knn).")(fn)
    return fn


def _schema_from(settings: Settings, data_path, rss_prefix, rss_columns, floor_column,
                 sentinel, rss_range):
    path = settings.get(data_path, "data.path")
    if not path:
        raise ConfigError("no dataset given: pass --data or set data.path in the config")
    columns = settings.get(rss_columns, "data.rss_columns")
    if isinstance(columns, str):
        lohi = _parse_pair(columns, "--rss-columns", ":")
        columns = (int(lohi[0]), int(lohi[1]))
    elif isinstance(columns, (list, tuple)):
        columns = (int(columns[0]), int(columns[1]))
    rng = settings.get(rss_range, "data.rss_range")
    if isinstance(rng, str):
        rss_min, rss_max = _parse_pair(rng, "--rss-range", ",")
    elif isinstance(rng, (list, tuple)):
        rss_min, rss_max = float(rng[0]), float(rng[1])
    else:
        rss_min = float(settings.get(None, "data.rss_min", DEFAULT_RSS_MIN))
        rss_max = float(settings.get(None, "data.rss_max", DEFAULT_RSS_MAX))
    schema = CsvSchema(
        rss_prefix=settings.get(rss_prefix, "data.rss_prefix", "WAP"),
        rss_columns=columns,
        floor_column=settings.get(floor_column, "data.floor_column", "FLOOR"),
        sentinel=float(settings.get(sentinel, "data.sentinel", DEFAULT_SENTINEL)),
        rss_min=rss_min,
        rss_max=rss_max,
    )
    return path, schema


def _anneal_from(settings: Settings, seed, sa_sweeps, sa_restarts, sa_t0, sa_cooling) -> AnnealConfig:
    return AnnealConfig(
        initial_temperature=settings.get(sa_t0, "anneal.initial_temperature", None),
        cooling_rate=float(settings.get(sa_cooling, "anneal.cooling_rate", 0.97)),
        sweeps=int(settings.get(sa_sweeps, "anneal.sweeps", 1000)),
        restarts=int(settings.get(sa_restarts, "anneal.restarts", 20)),
        seed=seed,
    )


def _classifier_from(settings: Settings, seed, classifier, knn_k, forest_trees, forest_depth) -> ClassifierSpec:
    depth = settings.get(forest_depth, "classifier.max_depth", None)
    return ClassifierSpec(
        kind=settings.get(classifier, "classifier.kind", "knn"),
        k_neighbors=int(settings.get(knn_k, "classifier.k_neighbors", 3)),
        trees=int(settings.get(forest_trees, "classifier.trees", 100)),
        max_depth=None if depth is None else int(depth),
        seed=seed,
    )


def _search_from(settings: Settings, mode, epsilon, alpha_precision, max_iterations,
                 accuracy_slack) -> SearchConfig:
    return SearchConfig(
        epsilon=float(settings.get(epsilon, "search.epsilon", 0.001)),
        alpha_precision=float(settings.get(alpha_precision, "search.alpha_precision", 1.0 / 1024.0)),
        max_iterations=int(settings.get(max_iterations, "search.max_iterations", 12)),
        mode=mode,
        accuracy_slack=float(settings.get(accuracy_slack, "search.accuracy_slack", 0.01)),
    )


def _echo_json(obj: dict) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


@main.command("gen-synthetic")
@click.option("--m", "m", type=int, default=2000, show_default=True, help="Sample count.")
@click.option("--informative", type=int, default=5, show_default=True)
@click.option("--redundant", type=int, default=10, show_default=True)
@click.option("--noise", type=int, default=5, show_default=True)
@click.option("--floors", type=int, default=None,
              help="Floor count (default 2**informative).")
@click.option("--filename", default="synthetic.csv", show_default=True)
@click.pass_context
@guarded
def gen_synthetic(ctx, m, informative, redundant, noise, floors, filename):
    """Generate a labeled synthetic fingerprint CSV with known ground truth."""
    out = ctx.obj["out"]
    os.makedirs(out, exist_ok=True)
    data = generate_synthetic(
        m=m,
        n_informative=informative,
        n_redundant=redundant,
        n_noise=noise,
        floors=floors,
        seed=ctx.obj["seed"],
    )
    path = save_fingerprint(data, os.path.join(out, filename))
    click.echo(f"wrote {path}", err=True)
    _echo_json(data.summary())


@main.command()
@dataset_options
@click.option("--bins", type=int, default=None, help=f"Bin count (default {DEFAULT_BINS}).")
@click.option("--no-plots", is_flag=True, default=False, help="Skip figure rendering.")
@click.pass_context
@guarded
def stats(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel, rss_range,
          bins, no_plots):
    """Write per-AP importance and the pairwise redundancy matrix."""
    settings = ctx.obj["settings"]
    path, schema = _schema_from(settings, data_path, rss_prefix, rss_columns,
                                floor_column, sentinel, rss_range)
    data = load_fingerprint(path, schema)
    b = int(settings.get(bins, "bins", DEFAULT_BINS))
    importance = importance_vector(discretize(data, b))
    redundancy = redundancy_matrix(data)
    out = ctx.obj["out"]
    os.makedirs(out, exist_ok=True)
    pipeline.write_importance_csv(data.ap_ids, importance, os.path.join(out, "importance.csv"))
    pipeline.write_redundancy_csv(data.ap_ids, redundancy, os.path.join(out, "redundancy.csv"))
    pipeline.write_json(data.summary(), os.path.join(out, "dataset_summary.json"))
    summary = {
        "dataset": data.summary(),
        "importance": pipeline._stat_summary(importance),
        "redundancy": pipeline._stat_summary(redundancy),
        "bins": b,
    }
    pipeline.write_json(summary, os.path.join(out, "stats_summary.json"))
    if not no_plots:
        from . import report as figs

        figs.save_importance_figure(data.ap_ids, importance, os.path.join(out, "importance.png"))
        figs.save_redundancy_figure(redundancy, os.path.join(out, "redundancy.png"))
    _echo_json(summary)


@main.command()
@dataset_options
@solver_options
@click.option("--bins", type=int, default=None, help=f"Bin count (default {DEFAULT_BINS}).")
@click.option("--alpha", type=float, default=0.5, show_default=True,
              help="Importance/redundancy balance in [0, 1].")
@click.option("--export-qubo", is_flag=True, default=False,
              help="Also write the QUBO matrix as dense CSV and sparse triplets.")
@click.pass_context
@guarded
def solve(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel, rss_range,
          solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling, bins, alpha, export_qubo):
    """Solve the selection QUBO at a fixed alpha and write selection.json."""
    settings = ctx.obj["settings"]
    seed = ctx.obj["seed"]
    path, schema = _schema_from(settings, data_path, rss_prefix, rss_columns,
                                floor_column, sentinel, rss_range)
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    data = load_fingerprint(path, schema)
    b = int(settings.get(bins, "bins", DEFAULT_BINS))
    importance = importance_vector(discretize(data, b))
    redundancy = redundancy_matrix(data)
    inst = QuboInstance(importance, redundancy, alpha)
    anneal = _anneal_from(settings, seed, sa_sweeps, sa_restarts, sa_t0, sa_cooling)
    solver_name = settings.get(solver, "solver", "sa")
    solution = make_solver(solver_name, anneal=anneal)(inst)
    out = ctx.obj["out"]
    os.makedirs(out, exist_ok=True)
    payload = pipeline.selection_payload(solution, data.ap_ids, alpha=alpha)
    pipeline.write_json(payload, os.path.join(out, "selection.json"))
    if export_qubo:
        p = build_matrix(inst)
        write_matrix_csv(p, os.path.join(out, "qubo_dense.csv"))
        write_matrix_triplets(p, os.path.join(out, "qubo_triplets.txt"))
    _echo_json(payload)


def _run_config(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel, rss_range,
                solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling,
                classifier, knn_k, forest_trees, forest_depth,
                bins, test_fraction, epsilon=None, alpha_precision=None,
                max_iterations=None, accuracy_slack=None, no_plots=False,
                export_qubo=False) -> pipeline.RunConfig:
    settings = ctx.obj["settings"]
    seed = ctx.obj["seed"]
    path, schema = _schema_from(settings, data_path, rss_prefix, rss_columns,
                                floor_column, sentinel, rss_range)
    return pipeline.RunConfig(
        data_path=path,
        schema=schema,
        bins=int(settings.get(bins, "bins", DEFAULT_BINS)),
        test_fraction=float(settings.get(test_fraction, "split.test_fraction",
                                         DEFAULT_TEST_FRACTION)),
        classifier=_classifier_from(settings, seed, classifier, knn_k, forest_trees, forest_depth),
        anneal=_anneal_from(settings, seed, sa_sweeps, sa_restarts, sa_t0, sa_cooling),
        search=_search_from(settings, ctx.obj["mode"], epsilon, alpha_precision,
                            max_iterations, accuracy_slack),
        solver=settings.get(solver, "solver", "sa"),
        seed=seed,
        out_dir=ctx.obj["out"],
        plots=not no_plots and bool(settings.get(None, "plots", True)),
        export_qubo=export_qubo,
    )


@main.command()
@dataset_options
@solver_options
@classifier_options
@click.option("--bins", type=int, default=None)
@click.option("--test-fraction", type=float, default=None,
              help=f"Held-out fraction (default {DEFAULT_TEST_FRACTION}).")
@click.option("--epsilon", type=float, default=None, help="Accuracy-gain stop threshold.")
@click.option("--alpha-precision", type=float, default=None, help="Minimum interval width.")
@click.option("--max-iterations", type=int, default=None, help="Bisection iteration cap.")
@click.option("--accuracy-slack", type=float, default=None,
              help="Accepted accuracy drop vs the full AP set.")
@click.option("--no-plots", is_flag=True, default=False)
@click.option("--export-qubo", is_flag=True, default=False)
@click.pass_context
@guarded
def auto(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel, rss_range,
         solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling,
         classifier, knn_k, forest_trees, forest_depth,
         bins, test_fraction, epsilon, alpha_precision, max_iterations, accuracy_slack,
         no_plots, export_qubo):
    """Full pipeline: binary-search alpha against the accuracy oracle."""
    cfg = _run_config(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel,
                      rss_range, solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling,
                      classifier, knn_k, forest_trees, forest_depth, bins, test_fraction,
                      epsilon, alpha_precision, max_iterations, accuracy_slack,
                      no_plots, export_qubo)
    run = pipeline.run_pipeline(cfg)
    click.echo(
        f"selected {run.trace.result_k}/{run.dataset_summary['n']} APs at "
        f"alpha={run.trace.result_alpha:.6f}; accuracy {run.trace.result_accuracy:.4f} "
        f"(full set {run.trace.base_accuracy:.4f}); artifacts in {cfg.out_dir}",
        err=True,
    )
    _echo_json(run.to_dict())


@main.command()
@dataset_options
@solver_options
@classifier_options
@click.option("--bins", type=int, default=None)
@click.option("--test-fraction", type=float, default=None)
@click.option("--grid", default=None, help="Comma-separated ascending alphas in [0, 1].")
@click.option("--grid-points", type=int, default=None,
              help="Evenly spaced grid size over [0, 1] (default 11).")
@click.option("--no-plots", is_flag=True, default=False)
@click.pass_context
@guarded
def sweep(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel, rss_range,
          solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling,
          classifier, knn_k, forest_trees, forest_depth,
          bins, test_fraction, grid, grid_points, no_plots):
    """Evaluate a whole alpha grid: selected count and accuracy per point."""
    if grid is not None:
        try:
            alphas = [float(v) for v in grid.split(",") if v.strip() != ""]
        except ValueError as exc:
            raise ConfigError(f"cannot parse --grid {grid!r}") from exc
    else:
        points = grid_points or 11
        if points < 2:
            raise ConfigError(f"--grid-points must be at least 2, got {points}")
        alphas = np.linspace(0.0, 1.0, points).tolist()
    cfg = _run_config(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel,
                      rss_range, solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling,
                      classifier, knn_k, forest_trees, forest_depth, bins, test_fraction,
                      no_plots=no_plots)
    trace, _ = pipeline.run_sweep(cfg, alphas)
    _echo_json(trace.to_dict())


@main.command()
@dataset_options
@classifier_options
@click.option("--test-fraction", type=float, default=None)
@click.option("--selection", "selection_path", type=click.Path(), default=None,
              help="selection.json restricting evaluation to chosen APs.")
@click.pass_context
@guarded
def evaluate(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel, rss_range,
             classifier, knn_k, forest_trees, forest_depth, test_fraction, selection_path):
    """Train the floor classifier and report held-out accuracy."""
    settings = ctx.obj["settings"]
    seed = ctx.obj["seed"]
    path, schema = _schema_from(settings, data_path, rss_prefix, rss_columns,
                                floor_column, sentinel, rss_range)
    data = load_fingerprint(path, schema)
    fraction = float(settings.get(test_fraction, "split.test_fraction", DEFAULT_TEST_FRACTION))
    train_set, test_set = split(data, fraction, seed)
    if selection_path:
        if not os.path.isfile(selection_path):
            raise ConfigError(f"selection file not found: {selection_path}")
        with open(selection_path, encoding="utf-8") as fh:
            chosen = json.load(fh).get("x", [])
        unknown = [a for a in chosen if a not in data.ap_ids]
        if unknown:
            raise ConfigError(f"selection names unknown AP ids: {', '.join(unknown[:5])}")
        mask = np.isin(np.array(data.ap_ids), chosen).astype(np.int8)
        train_set, test_set = reduce(train_set, mask), reduce(test_set, mask)
    spec = _classifier_from(settings, seed, classifier, knn_k, forest_trees, forest_depth)
    clf = train(spec, train_set)
    payload = evaluate_classifier(clf, test_set).to_dict()
    out = ctx.obj["out"]
    os.makedirs(out, exist_ok=True)
    pipeline.write_json(payload, os.path.join(out, "accuracy.json"))
    _echo_json(payload)


@main.command()
@dataset_options
@solver_options
@classifier_options
@click.option("--bins", type=int, default=None)
@click.option("--test-fraction", type=float, default=None)
@click.option("--solvers", default="sa,exhaustive", show_default=True,
              help="Comma-separated solver names to time on the same search task.")
@click.option("--no-plots", is_flag=True, default=False)
@click.pass_context
@guarded
def bench(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel, rss_range,
          solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling,
          classifier, knn_k, forest_trees, forest_depth,
          bins, test_fraction, solvers, no_plots):
    """Run the alpha search under each solver and tabulate wall times."""
    names = [s.strip() for s in solvers.split(",") if s.strip()]
    if not names:
        raise ConfigError("--solvers must name at least one solver")
    cfg = _run_config(ctx, data_path, rss_prefix, rss_columns, floor_column, sentinel,
                      rss_range, solver, sa_sweeps, sa_restarts, sa_t0, sa_cooling,
                      classifier, knn_k, forest_trees, forest_depth, bins, test_fraction,
                      no_plots=no_plots)
    payload = pipeline.run_bench(cfg, names)
    _echo_json(payload)


if __name__ == "__main__":
    main()
