"""Per-AP importance and pairwise redundancy statistics.

Importance of an AP is the Cramér's V association between its binned RSS and
the floor label. Redundancy of an AP pair is the absolute Pearson correlation
of their raw RSS columns, computed with the not-detected sentinel substituted
by one unit below the declared range.
"""

from __future__ import annotations

import numpy as np

from .dataset import DiscretizedDataset, FingerprintDataset


def contingency_table(bins: np.ndarray, floors: np.ndarray, b: int | None = None) -> np.ndarray:
    """Count table: entry (u, v) = samples with bin index u and floor label v.

    Rows are bin indices 0..b-1; columns follow the sorted distinct floor
    labels. Entries sum to the sample count.
    """
    bins = np.asarray(bins, dtype=np.int64).ravel()
    floors = np.asarray(floors).ravel()
    if bins.shape[0] != floors.shape[0]:
        raise ValueError(f"length mismatch: {bins.shape[0]} bins vs {floors.shape[0]} floors")
    if bins.shape[0] == 0:
        raise ValueError("empty inputs")
    labels, inv = np.unique(floors, return_inverse=True)
    nb = int(bins.max()) + 1 if b is None else int(b)
    counts = np.bincount(bins * labels.size + inv, minlength=nb * labels.size)
    return counts.reshape(nb, labels.size)


def chi_square(table: np.ndarray) -> float:
    """Chi-square statistic of a count table against row/column independence.

    Cells whose expected count is zero (empty row or column marginal)
    contribute nothing.
    """
    table = np.asarray(table, dtype=np.float64)
    total = table.sum()
    if table.size == 0 or total <= 0:
        raise ValueError("empty contingency table")
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    mask = expected > 0
    dev = table[mask] - expected[mask]
    return float((dev * dev / expected[mask]).sum())


def cramers_v(table: np.ndarray, m: int | None = None, effective_dims: bool = True) -> float:
    """Cramér's V association in [0, 1] for a bin-by-label count table.

    By default the normalizing dimension counts only rows/columns with a
    nonzero marginal, which keeps the statistic at most 1 when many bins are
    empty; pass ``effective_dims=False`` for the nominal-shape variant.
    Degenerate tables (effective dimension below 2 on either axis) score 0:
    a constant column carries no floor information.
    """
    table = np.asarray(table, dtype=np.float64)
    total = table.sum()
    if table.size == 0 or total <= 0:
        raise ValueError("empty contingency table")
    m = int(total) if m is None else int(m)
    if m <= 0:
        raise ValueError(f"sample count must be positive, got {m}")
    if effective_dims:
        rows = int((table.sum(axis=1) > 0).sum())
        cols = int((table.sum(axis=0) > 0).sum())
    else:
        rows, cols = table.shape
    dof = min(rows - 1, cols - 1)
    if dof <= 0:
        return 0.0
    v = np.sqrt(chi_square(table) / (m * dof))
    return float(min(max(v, 0.0), 1.0))


def importance_vector(d: DiscretizedDataset, effective_dims: bool = True) -> np.ndarray:
    """Cramér's V of every AP's binned column against the floor labels."""
    labels, inv = np.unique(d.floors, return_inverse=True)
    nf = labels.size
    out = np.empty(d.n, dtype=np.float64)
    for i in range(d.n):
        counts = np.bincount(d.bins[:, i].astype(np.int64) * nf + inv, minlength=d.b * nf)
        out[i] = cramers_v(counts.reshape(d.b, nf), d.m, effective_dims=effective_dims)
    return out


def pearson(u: np.ndarray, v: np.ndarray) -> float:
    """Sample Pearson correlation in [-1, 1]; 0 when either input is constant."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape[0] != v.shape[0]:
        raise ValueError(f"length mismatch: {u.shape[0]} vs {v.shape[0]}")
    if u.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    du = u - u.mean()
    dv = v - v.mean()
    su = np.sqrt((du * du).sum())
    sv = np.sqrt((dv * dv).sum())
    if su == 0.0 or sv == 0.0:
        return 0.0
    r = (du * dv).sum() / (su * sv)
    return float(min(max(r, -1.0), 1.0))


def redundancy_matrix(d: FingerprintDataset) -> np.ndarray:
    """Absolute pairwise Pearson correlations with a forced-zero diagonal.

    Works on the sentinel-substituted RSS matrix (see
    ``FingerprintDataset.filled_rss``). Constant columns correlate 0 with
    everything. The upper triangle is computed once and mirrored, so the
    result is exactly symmetric.
    """
    if d.n < 2:
        raise ValueError(f"need at least 2 APs, got {d.n}")
    x = d.filled_rss()
    x -= x.mean(axis=0)
    norms = np.sqrt((x * x).sum(axis=0))
    gram = x.T @ x
    denom = np.outer(norms, norms)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0, gram / denom, 0.0)
    r = np.abs(corr)
    np.clip(r, 0.0, 1.0, out=r)
    upper = np.triu(r, k=1)
    return upper + upper.T
