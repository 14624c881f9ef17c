"""End-to-end runs: load, split, stats, alpha search, evaluation, artifacts.

A run writes one output directory containing ``report.json``, ``trace.csv``,
``importance.csv``, ``redundancy.csv``, and ``selection.json`` (plus rendered
figures unless disabled). Decision outputs are deterministic for a fixed
seed; wall-clock timings are confined to the ``timings`` section of the
report and the ``wall_time_ms`` field of the selection file.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import report as figures
from .dataset import (
    DEFAULT_BINS,
    DEFAULT_TEST_FRACTION,
    CsvSchema,
    FingerprintDataset,
    discretize,
    load_fingerprint,
    reduce,
    split,
)
from .locate import ClassifierSpec, evaluate, make_localizer, train
from .qubo import QuboInstance, build_matrix, write_matrix_csv, write_matrix_triplets
from .search import SearchConfig, SearchTrace, binary_search_alpha, sweep_alpha
from .solver import AnnealConfig, Solution, make_solver
from .stats import importance_vector, redundancy_matrix


def write_json(obj: dict, path: str) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_csv(path: str, header: list, rows: list) -> str:
    """RFC 4180 CSV: header row, CRLF line endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _stat_summary(values: np.ndarray) -> dict:
    return {
        "min": float(values.min()),
        "max": float(values.max()),
        "mean": float(values.mean()),
    }


def write_importance_csv(ap_ids, importance, path: str) -> str:
    return write_csv(
        path, ["ap_id", "importance"], [[a, repr(float(v))] for a, v in zip(ap_ids, importance)]
    )


def write_redundancy_csv(ap_ids, redundancy, path: str) -> str:
    rows = [[repr(float(v)) for v in row] for row in np.asarray(redundancy)]
    return write_csv(path, list(ap_ids), rows)


def write_trace_csv(trace: SearchTrace, path: str) -> str:
    return write_csv(
        path,
        ["iteration", "alpha", "k", "accuracy"],
        [[r["iteration"], repr(r["alpha"]), r["k"], repr(r["accuracy"])] for r in trace.rows()],
    )


def selection_payload(sol: Solution, ap_ids, alpha: float | None = None) -> dict:
    payload = {
        "x": [ap_ids[i] for i in np.flatnonzero(np.asarray(sol.x) == 1)],
        "energy": sol.energy,
        "k": sol.k,
        "solver": sol.solver_name,
        "wall_time_ms": sol.wall_time * 1000.0,
    }
    if alpha is not None:
        payload["alpha"] = alpha
    return payload


@dataclass
class RunConfig:
    """Everything a pipeline run needs; the seed reaches every stochastic part."""

    data_path: str
    schema: CsvSchema = field(default_factory=CsvSchema)
    bins: int = DEFAULT_BINS
    test_fraction: float = DEFAULT_TEST_FRACTION
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    solver: str = "sa"
    seed: int = 0
    out_dir: str = "apsel-run"
    plots: bool = True
    export_qubo: bool = False


@dataclass(eq=False)
class RunReport:
    dataset_summary: dict
    split_summary: dict
    importance: np.ndarray
    redundancy: np.ndarray
    ap_ids: tuple
    trace: SearchTrace
    base_report: dict
    selected_report: dict
    selection: dict
    config_echo: dict
    timings: dict
    artifacts: list

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset_summary,
            "split": self.split_summary,
            "importance": _stat_summary(self.importance),
            "redundancy": _stat_summary(self.redundancy),
            "search": self.trace.to_dict(self.ap_ids),
            "selection": self.selection,
            "evaluation": {"full": self.base_report, "selected": self.selected_report},
            "config": self.config_echo,
            "timings": self.timings,
        }


class _StageClock:
    def __init__(self):
        self.timings: dict = {}
        self._t0 = time.perf_counter()

    def stage(self, name: str):
        clock = self

        class _Ctx:
            def __enter__(self):
                self.start = time.perf_counter()

            def __exit__(self, *exc):
                clock.timings[f"{name}_s"] = time.perf_counter() - self.start
                return False

        return _Ctx()

    def total(self) -> None:
        self.timings["total_s"] = time.perf_counter() - self._t0


def _seeded(cfg: RunConfig) -> RunConfig:
    """Propagate the run seed into every stochastic component."""
    return replace(
        cfg,
        anneal=replace(cfg.anneal, seed=cfg.seed),
        classifier=replace(cfg.classifier, seed=cfg.seed),
    )


def _config_echo(cfg: RunConfig) -> dict:
    return {
        "data_path": cfg.data_path,
        "bins": cfg.bins,
        "test_fraction": cfg.test_fraction,
        "classifier": {
            "kind": cfg.classifier.kind,
            "k_neighbors": cfg.classifier.k_neighbors,
            "trees": cfg.classifier.trees,
            "max_depth": cfg.classifier.max_depth,
        },
        "anneal": {
            "initial_temperature": cfg.anneal.initial_temperature,
            "cooling_rate": cfg.anneal.cooling_rate,
            "sweeps": cfg.anneal.sweeps,
            "restarts": cfg.anneal.restarts,
        },
        "search": {
            "epsilon": cfg.search.epsilon,
            "alpha_precision": cfg.search.alpha_precision,
            "max_iterations": cfg.search.max_iterations,
            "mode": cfg.search.mode,
            "accuracy_slack": cfg.search.accuracy_slack,
        },
        "solver": cfg.solver,
        "seed": cfg.seed,
    }


def _prepare(cfg: RunConfig, clock: _StageClock):
    """Shared front half: load, split, train-side statistics."""
    with clock.stage("load"):
        data = load_fingerprint(cfg.data_path, cfg.schema)
    with clock.stage("split"):
        train_set, test_set = split(data, cfg.test_fraction, cfg.seed)
    with clock.stage("stats"):
        importance = importance_vector(discretize(train_set, cfg.bins))
        redundancy = redundancy_matrix(train_set)
    return data, train_set, test_set, importance, redundancy


def run_pipeline(cfg: RunConfig) -> RunReport:
    """Execute load -> discretize -> stats -> alpha search -> evaluate."""
    cfg = _seeded(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    clock = _StageClock()
    data, train_set, test_set, importance, redundancy = _prepare(cfg, clock)

    solver = make_solver(cfg.solver, anneal=cfg.anneal)
    localizer = make_localizer(train_set, test_set, cfg.classifier)
    with clock.stage("search"):
        trace = binary_search_alpha(importance, redundancy, localizer, solver, cfg.search)

    with clock.stage("evaluate"):
        clf_full = train(cfg.classifier, train_set)
        base_report = evaluate(clf_full, test_set).to_dict()
        selected_report = None
        if trace.result_k >= 1:
            clf_sel = train(cfg.classifier, reduce(train_set, trace.result_x))
            selected_report = evaluate(clf_sel, reduce(test_set, trace.result_x)).to_dict()

    selection = selection_payload(trace.result_solution, data.ap_ids, alpha=trace.result_alpha)

    artifacts = []
    with clock.stage("write"):
        out = cfg.out_dir
        artifacts.append(write_importance_csv(data.ap_ids, importance, os.path.join(out, "importance.csv")))
        artifacts.append(write_redundancy_csv(data.ap_ids, redundancy, os.path.join(out, "redundancy.csv")))
        artifacts.append(write_trace_csv(trace, os.path.join(out, "trace.csv")))
        artifacts.append(write_json(trace.to_dict(data.ap_ids), os.path.join(out, "trace.json")))
        artifacts.append(write_json(selection, os.path.join(out, "selection.json")))
        if cfg.export_qubo:
            p = build_matrix(QuboInstance(importance, redundancy, trace.result_alpha))
            artifacts.append(write_matrix_csv(p, os.path.join(out, "qubo_dense.csv")))
            artifacts.append(write_matrix_triplets(p, os.path.join(out, "qubo_triplets.txt")))
        if cfg.plots:
            artifacts.append(figures.save_importance_figure(data.ap_ids, importance, os.path.join(out, "importance.png")))
            artifacts.append(figures.save_redundancy_figure(redundancy, os.path.join(out, "redundancy.png")))
            artifacts.append(figures.save_trace_figure(trace, os.path.join(out, "trace.png")))

    clock.total()
    run = RunReport(
        dataset_summary=data.summary(),
        split_summary={
            "train_m": train_set.m,
            "test_m": test_set.m,
            "test_fraction": cfg.test_fraction,
        },
        importance=importance,
        redundancy=redundancy,
        ap_ids=data.ap_ids,
        trace=trace,
        base_report=base_report,
        selected_report=selected_report,
        selection={k: v for k, v in selection.items() if k != "wall_time_ms"},
        config_echo=_config_echo(cfg),
        timings=clock.timings,
        artifacts=artifacts,
    )
    report_path = os.path.join(cfg.out_dir, "report.json")
    write_json(run.to_dict(), report_path)
    run.artifacts.append(report_path)
    return run


def run_sweep(cfg: RunConfig, grid) -> tuple[SearchTrace, list]:
    """Alpha sweep over a fixed grid with the same artifact conventions."""
    cfg = _seeded(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    clock = _StageClock()
    data, train_set, test_set, importance, redundancy = _prepare(cfg, clock)
    solver = make_solver(cfg.solver, anneal=cfg.anneal)
    localizer = make_localizer(train_set, test_set, cfg.classifier)
    with clock.stage("sweep"):
        trace = sweep_alpha(
            importance, redundancy, localizer, solver, grid, cfg.search.accuracy_slack
        )
    artifacts = [
        write_trace_csv(trace, os.path.join(cfg.out_dir, "trace.csv")),
        write_json(trace.to_dict(data.ap_ids), os.path.join(cfg.out_dir, "trace.json")),
    ]
    if cfg.plots:
        artifacts.append(figures.save_trace_figure(trace, os.path.join(cfg.out_dir, "sweep.png")))
    return trace, artifacts


def run_bench(cfg: RunConfig, solvers: list[str]) -> dict:
    """Time the same search task under each solver; no speedup claims, just rows."""
    cfg = _seeded(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    clock = _StageClock()
    _, train_set, test_set, importance, redundancy = _prepare(cfg, clock)
    localizer = make_localizer(train_set, test_set, cfg.classifier)
    rows = []
    for name in solvers:
        solver = make_solver(name, anneal=cfg.anneal)
        start = time.perf_counter()
        trace = binary_search_alpha(importance, redundancy, localizer, solver, cfg.search)
        rows.append(
            {
                "solver": name,
                "wall_time_s": time.perf_counter() - start,
                "k": trace.result_k,
                "alpha": trace.result_alpha,
                "iterations": len(trace.iterations),
                "accuracy": trace.result_accuracy,
            }
        )
    payload = {"rows": rows}
    write_json(payload, os.path.join(cfg.out_dir, "bench.json"))
    write_csv(
        os.path.join(cfg.out_dir, "bench.csv"),
        ["solver", "wall_time_s", "k", "alpha", "iterations", "accuracy"],
        [
            [r["solver"], repr(r["wall_time_s"]), r["k"], repr(r["alpha"]), r["iterations"], repr(r["accuracy"])]
            for r in rows
        ],
    )
    if cfg.plots:
        figures.save_bench_figure(
            [r["solver"] for r in rows], [max(r["wall_time_s"], 1e-9) for r in rows],
            os.path.join(cfg.out_dir, "bench.png"),
        )
    return payload
