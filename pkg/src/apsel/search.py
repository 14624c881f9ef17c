"""Tuning the importance/redundancy balance against the accuracy oracle.

``binary_search_alpha`` bisects alpha in [0, 1]: whenever the reduced
fingerprint localizes worse than the full one, alpha moves up (selecting more
APs), otherwise down. Two termination modes exist:

* ``robust`` (default): stop once the interval is narrower than
  ``alpha_precision``, or earlier when an acceptable-accuracy selection
  cannot shrink any further; always bounded by ``max_iterations``. The
  result is the smallest-cardinality iterate whose accuracy stays within
  ``accuracy_slack`` of the full-set baseline.
* ``paper-faithful``: the literal do-while rule — stop as soon as the
  accuracy gain over the previous iteration falls below ``epsilon`` — and
  return the final iterate. The previous-accuracy reference starts at the
  baseline accuracy.

``sweep_alpha`` evaluates a fixed alpha grid instead, producing the data for
selected-count/accuracy-versus-alpha charts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .qubo import QuboInstance

MODES = ("robust", "paper-faithful")


@dataclass(frozen=True)
class SearchConfig:
    epsilon: float = 0.001
    alpha_precision: float = 1.0 / 1024.0
    max_iterations: int = 12
    mode: str = "robust"
    accuracy_slack: float = 0.01

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be nonnegative, got {self.epsilon}")
        if not 0.0 < self.alpha_precision < 1.0:
            raise ConfigError(f"alpha_precision must lie in (0, 1), got {self.alpha_precision}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.accuracy_slack < 0:
            raise ConfigError(f"accuracy_slack must be nonnegative, got {self.accuracy_slack}")


@dataclass(frozen=True, eq=False)
class SearchIteration:
    """One solved alpha: the interval it was drawn from, and what it achieved."""

    index: int
    alpha: float
    accuracy: float
    lo: float
    hi: float
    solution: object

    @property
    def k(self) -> int:
        return self.solution.k

    @property
    def x(self) -> np.ndarray:
        return self.solution.x


@dataclass(eq=False)
class SearchTrace:
    """Full record of a search or sweep, ready for reporting."""

    base_accuracy: float
    mode: str
    iterations: list = field(default_factory=list)
    result_index: int = -1
    result_alpha: float = 0.0
    result_k: int = 0
    result_accuracy: float = 0.0
    result_x: np.ndarray | None = None

    @property
    def result_solution(self):
        return self.iterations[self.result_index].solution

    def rows(self) -> list[dict]:
        return [
            {"iteration": it.index, "alpha": it.alpha, "k": it.k, "accuracy": it.accuracy}
            for it in self.iterations
        ]

    def to_dict(self, ap_ids: tuple | None = None) -> dict:
        def ids(x):
            if ap_ids is None:
                return [int(i) for i in np.flatnonzero(np.asarray(x) == 1)]
            return [ap_ids[i] for i in np.flatnonzero(np.asarray(x) == 1)]

        return {
            "mode": self.mode,
            "base_accuracy": self.base_accuracy,
            "iterations": [
                {
                    "iteration": it.index,
                    "alpha": it.alpha,
                    "k": it.k,
                    "accuracy": it.accuracy,
                    "interval": [it.lo, it.hi],
                    "ap_ids": ids(it.x),
                }
                for it in self.iterations
            ],
            "result": {
                "alpha": self.result_alpha,
                "k": self.result_k,
                "accuracy": self.result_accuracy,
                "ap_ids": ids(self.result_x) if self.result_x is not None else [],
            },
        }


def _evaluate_selection(localizer, sol) -> float:
    # an empty selection is recorded as zero accuracy, never localized
    return float(localizer(sol.x)) if sol.k > 0 else 0.0


def _set_result(trace: SearchTrace, it: SearchIteration) -> None:
    trace.result_index = it.index
    trace.result_alpha = it.alpha
    trace.result_k = it.k
    trace.result_accuracy = it.accuracy
    trace.result_x = it.x


def _pick_best(trace: SearchTrace, accuracy_slack: float) -> None:
    """Smallest acceptable selection, falling back to the most accurate one."""
    ok = [
        it
        for it in trace.iterations
        if it.k >= 1 and it.accuracy >= trace.base_accuracy - accuracy_slack
    ]
    if ok:
        _set_result(trace, min(ok, key=lambda it: (it.k, -it.accuracy, it.index)))
    else:
        pool = [it for it in trace.iterations if it.k >= 1] or trace.iterations
        _set_result(trace, min(pool, key=lambda it: (-it.accuracy, it.k, it.index)))


def binary_search_alpha(
    importance: np.ndarray,
    redundancy: np.ndarray,
    localizer,
    solver,
    cfg: SearchConfig | None = None,
) -> SearchTrace:
    """Bisect alpha against the localization-accuracy oracle.

    ``localizer`` maps a binary selection to held-out floor accuracy;
    ``solver`` maps a QuboInstance to a Solution. Both are called at most
    ``max_iterations`` times plus one baseline evaluation, and in robust mode
    at most ceil(log2(1 / alpha_precision)) times.
    """
    cfg = cfg or SearchConfig()
    importance = np.asarray(importance, dtype=np.float64)
    n = importance.shape[0]
    base_accuracy = float(localizer(np.ones(n, dtype=np.int8)))
    trace = SearchTrace(base_accuracy=base_accuracy, mode=cfg.mode)

    lo, hi = 0.0, 1.0
    prev_accuracy = base_accuracy
    while len(trace.iterations) < cfg.max_iterations:
        alpha = 0.5 * (lo + hi)
        sol = solver(QuboInstance(importance, redundancy, alpha))
        accuracy = _evaluate_selection(localizer, sol)
        trace.iterations.append(
            SearchIteration(len(trace.iterations), alpha, accuracy, lo, hi, sol)
        )
        if accuracy < base_accuracy:
            lo = alpha  # select more APs
        else:
            hi = alpha
        if cfg.mode == "paper-faithful":
            if accuracy - prev_accuracy < cfg.epsilon:
                break
            prev_accuracy = accuracy
        else:
            acceptable = accuracy >= base_accuracy - cfg.accuracy_slack
            if acceptable and sol.k <= 1:
                break  # no smaller usable selection exists
            if (hi - lo) <= cfg.alpha_precision:
                break

    if cfg.mode == "paper-faithful":
        _set_result(trace, trace.iterations[-1])
    else:
        _pick_best(trace, cfg.accuracy_slack)
    return trace


def sweep_alpha(
    importance: np.ndarray,
    redundancy: np.ndarray,
    localizer,
    solver,
    grid,
    accuracy_slack: float = 0.01,
) -> SearchTrace:
    """Solve and localize at every alpha of an ascending grid in [0, 1]."""
    grid = [float(a) for a in grid]
    if not grid:
        raise ConfigError("alpha grid is empty")
    if any(not 0.0 <= a <= 1.0 for a in grid):
        raise ConfigError("alpha grid values must lie in [0, 1]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("alpha grid must be strictly ascending")

    importance = np.asarray(importance, dtype=np.float64)
    n = importance.shape[0]
    base_accuracy = float(localizer(np.ones(n, dtype=np.int8)))
    trace = SearchTrace(base_accuracy=base_accuracy, mode="sweep")
    for i, alpha in enumerate(grid):
        sol = solver(QuboInstance(importance, redundancy, alpha))
        accuracy = _evaluate_selection(localizer, sol)
        trace.iterations.append(SearchIteration(i, alpha, accuracy, alpha, alpha, sol))
    _pick_best(trace, accuracy_slack)
    return trace
