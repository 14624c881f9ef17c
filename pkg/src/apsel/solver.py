"""QUBO minimizers: exhaustive enumeration and seeded simulated annealing.

Exhaustive enumeration is the ground-truth oracle for small instances and
backs the cardinality-constrained minimum used by the property tests.
Simulated annealing handles realistic sizes. Every run is reproducible from
its seed: all randomness is drawn up front from numpy Generators, so the
annealing kernel itself is a pure function (and JIT-compiled when numba is
available, with an identical pure-Python fallback).

Solvers are reached through a name registry so that alternative backends
(e.g. a remote annealing service) can be plugged in without touching callers.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SolverError
from .qubo import QuboInstance, build_matrix, energy

EXHAUSTIVE_CAP = 24
_TABLE_CAP = 22  # above this, enumerate in streaming chunks instead of caching
_CHUNK = 1 << 16


@dataclass(frozen=True)
class AnnealConfig:
    """Simulated-annealing schedule.

    ``initial_temperature=None`` scales the start temperature to the instance
    as max|P_ij| * n. Temperature is multiplied by ``cooling_rate`` after each
    sweep of n proposed single-bit flips.
    """

    initial_temperature: float | None = None
    cooling_rate: float = 0.97
    sweeps: int = 1000
    restarts: int = 20
    seed: int = 0

    def __post_init__(self) -> None:
        if self.initial_temperature is not None and self.initial_temperature <= 0:
            raise ConfigError(f"initial temperature must be positive, got {self.initial_temperature}")
        if not 0.0 < self.cooling_rate < 1.0:
            raise ConfigError(f"cooling rate must lie in (0, 1), got {self.cooling_rate}")
        if self.sweeps < 1:
            raise ConfigError(f"sweep count must be at least 1, got {self.sweeps}")
        if self.restarts < 1:
            raise ConfigError(f"restart count must be at least 1, got {self.restarts}")


@dataclass(frozen=True, eq=False)
class Solution:
    """A selection vector with its recomputed energy and cardinality."""

    x: np.ndarray
    energy: float
    k: int
    solver_name: str
    wall_time: float


def _bit_matrix(idx: np.ndarray, n: int) -> np.ndarray:
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.float64)


class _SubsetTable:
    """Linear/quadratic objective pieces for every one of the 2^n subsets.

    For subset index s, ``linear[s]`` is the summed importance and ``quad[s]``
    the ordered-pair redundancy, so the energy at any alpha is the cheap
    combination ``quad - alpha * (linear + quad)``.
    """

    def __init__(self, importance: np.ndarray, redundancy: np.ndarray):
        n = importance.shape[0]
        if n > _TABLE_CAP:
            raise SolverError(f"subset table capped at n={_TABLE_CAP}, got {n}")
        total = 1 << n
        self.n = n
        self.linear = np.empty(total, dtype=np.float64)
        self.quad = np.empty(total, dtype=np.float64)
        self.pop = np.empty(total, dtype=np.uint8)
        for lo in range(0, total, _CHUNK):
            hi = min(lo + _CHUNK, total)
            bits = _bit_matrix(np.arange(lo, hi, dtype=np.int64), n)
            self.linear[lo:hi] = bits @ importance
            self.quad[lo:hi] = ((bits @ redundancy) * bits).sum(axis=1)
            self.pop[lo:hi] = bits.sum(axis=1).astype(np.uint8)

    def energies(self, alpha: float) -> np.ndarray:
        return self.quad - alpha * (self.linear + self.quad)


@functools.lru_cache(maxsize=4)
def _cached_table(importance_bytes: bytes, redundancy_bytes: bytes, n: int) -> _SubsetTable:
    importance = np.frombuffer(importance_bytes, dtype=np.float64).copy()
    redundancy = np.frombuffer(redundancy_bytes, dtype=np.float64).reshape(n, n).copy()
    return _SubsetTable(importance, redundancy)


def _table_for(inst: QuboInstance) -> _SubsetTable:
    return _cached_table(inst.importance.tobytes(), inst.redundancy.tobytes(), inst.n)


def _index_to_x(idx: int, n: int) -> np.ndarray:
    return ((idx >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)


def _lex_rank(idx: np.ndarray, n: int) -> np.ndarray:
    """Rank of each subset index under lexicographic order of its bit vector.

    Bit j of a subset index is selection entry x_j, so comparing vectors
    (x_0, x_1, ...) lexicographically means comparing bit-reversed indices.
    """
    ranks = np.zeros(idx.shape[0], dtype=np.int64)
    for j in range(n):
        ranks |= ((idx >> j) & 1) << (n - 1 - j)
    return ranks


def _pick_candidate(cand_idx: np.ndarray, pop: np.ndarray, n: int) -> int:
    """Tie-break tied-energy subsets: smallest cardinality, then lexicographic."""
    kmin = pop[cand_idx].min()
    smallest = cand_idx[pop[cand_idx] == kmin]
    if smallest.size == 1:
        return int(smallest[0])
    return int(smallest[np.argmin(_lex_rank(smallest, n))])


def _finish(inst: QuboInstance, idx: int, name: str, t0: float) -> Solution:
    x = _index_to_x(idx, inst.n)
    return Solution(
        x=x,
        energy=energy(inst, x),
        k=int(x.sum()),
        solver_name=name,
        wall_time=time.perf_counter() - t0,
    )


def _scan_min(inst: QuboInstance, k_max: int | None) -> int:
    """Streaming enumeration for sizes too large for a cached table."""
    n = inst.n
    best = None  # (energy, pop, lex_rank, subset_index)
    for lo in range(0, 1 << n, _CHUNK):
        hi = min(lo + _CHUNK, 1 << n)
        idx = np.arange(lo, hi, dtype=np.int64)
        bits = _bit_matrix(idx, n)
        pops = bits.sum(axis=1).astype(np.int64)
        e = -inst.alpha * (bits @ inst.importance) + (1.0 - inst.alpha) * (
            (bits @ inst.redundancy) * bits
        ).sum(axis=1)
        if k_max is not None:
            ok = pops <= k_max
            if not ok.any():
                continue
            idx, e, pops = idx[ok], e[ok], pops[ok]
        cmin = float(e.min())
        if best is not None and cmin > best[0]:
            continue
        tied = np.flatnonzero(e == cmin)
        kmin = int(pops[tied].min())
        tied = tied[pops[tied] == kmin]
        ranks = _lex_rank(idx[tied], n)
        at = int(np.argmin(ranks))
        cand = (cmin, kmin, int(ranks[at]), int(idx[tied[at]]))
        if best is None or cand[:3] < best[:3]:
            best = cand
    return best[3]


def solve_exhaustive(inst: QuboInstance, cap: int = EXHAUSTIVE_CAP) -> Solution:
    """Enumerate all 2^n selections and return a minimum-energy one.

    Ties are broken toward the smallest cardinality, then the
    lexicographically smallest vector, so results are deterministic.
    """
    t0 = time.perf_counter()
    if inst.n > cap:
        raise SolverError(f"exhaustive enumeration capped at n={cap}, got n={inst.n}")
    if inst.n <= _TABLE_CAP:
        table = _table_for(inst)
        e = table.energies(inst.alpha)
        cand = np.flatnonzero(e == e.min())
        idx = _pick_candidate(cand, table.pop, inst.n)
    else:
        idx = _scan_min(inst, None)
    return _finish(inst, idx, "exhaustive", t0)


def exhaustive_minimizers(inst: QuboInstance, atol: float = 1e-12) -> list[np.ndarray]:
    """All selections within ``atol`` of the global minimum energy.

    Ordered by cardinality then lexicographically. Only available at subset
    table sizes (n <= 22).
    """
    table = _table_for(inst)
    e = table.energies(inst.alpha)
    cand = np.flatnonzero(e <= e.min() + atol)
    vecs = [_index_to_x(int(s), inst.n) for s in cand]
    vecs.sort(key=lambda v: (int(v.sum()), tuple(v)))
    return vecs


def constrained_min(inst: QuboInstance, k_max: int, cap: int = EXHAUSTIVE_CAP) -> Solution:
    """Minimum energy over selections with at most ``k_max`` ones."""
    t0 = time.perf_counter()
    if inst.n > cap:
        raise SolverError(f"exhaustive enumeration capped at n={cap}, got n={inst.n}")
    if not 0 <= k_max <= inst.n:
        raise SolverError(f"cardinality budget must lie in [0, {inst.n}], got {k_max}")
    if inst.n <= _TABLE_CAP:
        table = _table_for(inst)
        e = table.energies(inst.alpha)
        feasible = np.flatnonzero(table.pop <= k_max)
        sub = e[feasible]
        cand = feasible[sub == sub.min()]
        idx = _pick_candidate(cand, table.pop, inst.n)
    else:
        idx = _scan_min(inst, k_max)
    return _finish(inst, idx, "exhaustive<=k", t0)


def single_flip_delta(p: np.ndarray, x: np.ndarray, k: int) -> float:
    """Energy change of flipping bit k of x under matrix p, in O(n).

    For symmetric p and binary x, flipping x_k by d = 1 - 2 x_k changes
    x^T p x by d * (p_kk + 2 * sum_{j != k} p_kj x_j).
    """
    xf = np.asarray(x, dtype=np.float64)
    d = 1.0 - 2.0 * xf[k]
    return float(d * (p[k, k] + 2.0 * (p[k] @ xf - p[k, k] * xf[k])))


def _sa_kernel_py(p, x, flip_order, unif, t0, cooling, best_x):
    """One annealing restart; pure function of its pre-drawn random inputs.

    Maintains the field g = p @ x so each proposal costs O(1) and each
    accepted flip O(n). Returns the best energy seen; the matching state is
    written into best_x.
    """
    n = x.shape[0]
    g = np.zeros(n, dtype=np.float64)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += p[i, j] * x[j]
        g[i] = acc
    e = 0.0
    for i in range(n):
        if x[i]:
            e += p[i, i]
            for j in range(i + 1, n):
                if x[j]:
                    e += 2.0 * p[i, j]
    best = e
    for i in range(n):
        best_x[i] = x[i]
    t = t0
    sweeps = flip_order.shape[0]
    for s in range(sweeps):
        for c in range(n):
            k = flip_order[s, c]
            d = 1.0 - 2.0 * x[k]
            delta = d * (p[k, k] + 2.0 * (g[k] - p[k, k] * x[k]))
            take = delta <= 0.0
            if not take and t > 0.0:
                take = unif[s, c] < math.exp(-delta / t)
            if take:
                x[k] = 1 - x[k]
                e += delta
                for j in range(n):
                    g[j] += d * p[j, k]
                if e < best:
                    best = e
                    for j in range(n):
                        best_x[j] = x[j]
        t *= cooling
    return best


try:
    import numba

    _sa_kernel = numba.njit(cache=True)(_sa_kernel_py)
except ImportError:  # pragma: no cover - numba is a declared dependency
    _sa_kernel = _sa_kernel_py


def _restart_draws(rng: np.random.Generator, n: int, sweeps: int):
    """Fixed draw order: initial state, flip permutations, acceptance uniforms."""
    x0 = rng.integers(0, 2, size=n).astype(np.int8)
    order = np.tile(np.arange(n, dtype=np.int64), (sweeps, 1))
    order = rng.permuted(order, axis=1)
    unif = rng.random((sweeps, n))
    return x0, order, unif


def solve_sa(inst: QuboInstance, cfg: AnnealConfig | None = None) -> Solution:
    """Seeded multi-restart simulated annealing.

    Restart r draws its randomness from ``default_rng(seed + r)``, so results
    are identical for a fixed seed regardless of scheduling. Within a sweep,
    bits are proposed in a random order; worsening flips are accepted with
    probability exp(-delta / T). The best state across restarts wins, with
    the lowest restart index breaking exact energy ties.
    """
    cfg = cfg or AnnealConfig()
    p = build_matrix(inst)
    t0 = cfg.initial_temperature
    if t0 is None:
        scale = float(np.abs(p).max()) * inst.n
        t0 = scale if scale > 0 else 1.0
    start = time.perf_counter()
    best_x = None
    best_e = math.inf
    for r in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + r)
        x0, order, unif = _restart_draws(rng, inst.n, cfg.sweeps)
        out = np.empty(inst.n, dtype=np.int8)
        _sa_kernel(p, x0, order, unif, float(t0), float(cfg.cooling_rate), out)
        e = energy(inst, out)
        if e < best_e:
            best_e = e
            best_x = out
    return Solution(
        x=best_x,
        energy=best_e,
        k=int(best_x.sum()),
        solver_name="sa",
        wall_time=time.perf_counter() - start,
    )


_SOLVERS: dict = {}


def register_solver(name: str, factory) -> None:
    """Register a solver factory: ``factory(**options) -> fn(inst) -> Solution``."""
    _SOLVERS[name] = factory


def solver_names() -> list[str]:
    return sorted(_SOLVERS)


def make_solver(name: str, **options):
    """Look up a solver by name and bind its options.

    Factories accept (and ignore) options meant for other solvers so one
    option set can drive any registered backend.
    """
    try:
        factory = _SOLVERS[name]
    except KeyError:
        raise SolverError(f"unknown solver {name!r}; available: {', '.join(solver_names())}")
    return factory(**options)


register_solver("sa", lambda anneal=None, **_: (lambda inst: solve_sa(inst, anneal)))
register_solver(
    "exhaustive",
    lambda cap=EXHAUSTIVE_CAP, **_: (lambda inst: solve_exhaustive(inst, cap)),
)
