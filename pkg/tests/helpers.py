"""Shared test utilities: naive statistical oracles and instance generators.

The naive implementations below are deliberately written as plain double
loops, independent of the library's vectorized code paths, so they can serve
as ground truth.
"""

import math

import numpy as np

from apsel.qubo import QuboInstance


def naive_chi_square(table) -> float:
    table = [[float(v) for v in row] for row in table]
    rows = len(table)
    cols = len(table[0])
    total = sum(sum(row) for row in table)
    row_sums = [sum(table[r]) for r in range(rows)]
    col_sums = [sum(table[r][c] for r in range(rows)) for c in range(cols)]
    stat = 0.0
    for r in range(rows):
        for c in range(cols):
            expected = row_sums[r] * col_sums[c] / total
            if expected > 0:
                stat += (table[r][c] - expected) ** 2 / expected
    return stat


def naive_cramers_v(table, m=None) -> float:
    rows = [r for r in range(len(table)) if sum(table[r]) > 0]
    cols = [c for c in range(len(table[0])) if sum(row[c] for row in table) > 0]
    dof = min(len(rows) - 1, len(cols) - 1)
    if dof <= 0:
        return 0.0
    m = sum(sum(row) for row in table) if m is None else m
    return min(1.0, math.sqrt(naive_chi_square(table) / (m * dof)))


def naive_pearson(u, v) -> float:
    n = len(u)
    mu = sum(u) / n
    mv = sum(v) / n
    cov = 0.0
    var_u = 0.0
    var_v = 0.0
    for a, b in zip(u, v):
        cov += (a - mu) * (b - mv)
        var_u += (a - mu) ** 2
        var_v += (b - mv) ** 2
    if var_u == 0.0 or var_v == 0.0:
        return 0.0
    return cov / math.sqrt(var_u * var_v)


def naive_energy(importance, redundancy, alpha, x) -> float:
    n = len(importance)
    linear = 0.0
    for i in range(n):
        linear += importance[i] * x[i]
    quad = 0.0
    for i in range(n):
        for j in range(n):
            quad += redundancy[i][j] * x[i] * x[j]
    return -alpha * linear + (1.0 - alpha) * quad


def random_importance_redundancy(n: int, rng: np.random.Generator):
    """Importance uniform in [0, 1]; redundancy from a random correlation matrix."""
    importance = rng.random(n)
    base = rng.normal(size=(2 * n, n))
    corr = np.corrcoef(base, rowvar=False)
    redundancy = np.abs(corr)
    np.fill_diagonal(redundancy, 0.0)
    redundancy = np.triu(redundancy, 1)
    redundancy = redundancy + redundancy.T
    np.clip(redundancy, 0.0, 1.0, out=redundancy)
    return importance, redundancy


def random_instance(n: int, alpha: float, rng: np.random.Generator) -> QuboInstance:
    importance, redundancy = random_importance_redundancy(n, rng)
    return QuboInstance(importance, redundancy, alpha)


def two_ap_instance(alpha: float) -> QuboInstance:
    """The worked 2-AP example: I = (0.5, 0.3), R_01 = 0.2."""
    redundancy = np.array([[0.0, 0.2], [0.2, 0.0]])
    return QuboInstance(np.array([0.5, 0.3]), redundancy, alpha)
