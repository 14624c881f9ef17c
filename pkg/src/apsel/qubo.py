"""The selection objective: a QUBO trading AP importance against redundancy.

For a binary selection x and balance alpha in [0, 1]:

    Q(x, alpha) = -alpha * sum_i I_i x_i + (1 - alpha) * sum_{i,j} R_ij x_i x_j

The quadratic sum runs over all ordered pairs, so each unordered pair
contributes twice. The equivalent matrix form is x^T P(alpha) x with

    P_ij = R_ij - alpha * (R_ij + [i == j] * I_i)

which, with a zero-diagonal R, puts -alpha * I_i on the diagonal and
(1 - alpha) * R_ij off it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _as_binary(x, n: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (n,):
        raise ValueError(f"selection vector must have shape ({n},), got {x.shape}")
    xf = x.astype(np.float64)
    if not np.isin(xf, (0.0, 1.0)).all():
        raise ValueError("selection vector entries must be 0 or 1")
    return xf


@dataclass(frozen=True, eq=False)
class QuboInstance:
    """Importance vector, redundancy matrix, and the balance parameter."""

    importance: np.ndarray
    redundancy: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        imp = np.ascontiguousarray(np.asarray(self.importance, dtype=np.float64))
        red = np.ascontiguousarray(np.asarray(self.redundancy, dtype=np.float64))
        if imp.ndim != 1:
            raise ValueError(f"importance must be a vector, got shape {imp.shape}")
        n = imp.shape[0]
        if red.shape != (n, n):
            raise ValueError(f"redundancy must be {n}x{n}, got {red.shape}")
        if imp.size and (imp.min() < 0.0 or imp.max() > 1.0):
            raise ValueError("importance entries must lie in [0, 1]")
        if red.size and (red.min() < 0.0 or red.max() > 1.0):
            raise ValueError("redundancy entries must lie in [0, 1]")
        if np.diagonal(red).any():
            raise ValueError("redundancy diagonal must be zero")
        if not np.array_equal(red, red.T):
            raise ValueError("redundancy matrix must be symmetric")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        imp.setflags(write=False)
        red.setflags(write=False)
        object.__setattr__(self, "importance", imp)
        object.__setattr__(self, "redundancy", red)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n(self) -> int:
        return self.importance.shape[0]


def build_matrix(inst: QuboInstance) -> np.ndarray:
    """Dense symmetric matrix P(alpha) with x^T P x equal to the objective."""
    p = (1.0 - inst.alpha) * inst.redundancy - np.diag(inst.alpha * inst.importance)
    return p


def importance_of(inst: QuboInstance, x) -> float:
    """Total importance of a selection: sum of I_i over the chosen APs."""
    xf = _as_binary(x, inst.n)
    return float(inst.importance @ xf)


def redundancy_of(inst: QuboInstance, x) -> float:
    """Total redundancy of a selection over ordered pairs (each pair twice)."""
    xf = _as_binary(x, inst.n)
    return float(xf @ (inst.redundancy @ xf))


def energy(inst: QuboInstance, x) -> float:
    """Objective value Q(x, alpha); fixed accumulation order, reentrant."""
    xf = _as_binary(x, inst.n)
    lin = float(inst.importance @ xf)
    quad = float(xf @ (inst.redundancy @ xf))
    return -inst.alpha * lin + (1.0 - inst.alpha) * quad


def write_matrix_csv(p: np.ndarray, path: str) -> str:
    """Dense CSV export of a QUBO matrix (plain numeric rows, no header)."""
    np.savetxt(path, np.asarray(p, dtype=np.float64), delimiter=",", fmt="%.17g")
    return path


def write_matrix_triplets(p: np.ndarray, path: str) -> str:
    """Sparse export: one ``i j value`` line per nonzero entry with i <= j."""
    p = np.asarray(p, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(p.shape[0]):
            for j in range(i, p.shape[1]):
                if p[i, j] != 0.0:
                    fh.write(f"{i} {j} {p[i, j]:.17g}\n")
    return path
