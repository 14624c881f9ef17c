"""Headless figure rendering for run artifacts.

Every function writes one PNG next to the delimited outputs and returns the
path. The Agg backend is forced so rendering works without a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def save_importance_figure(ap_ids, importance, path: str) -> str:
    """Bar chart of per-AP importance (tick labels dropped for wide sets)."""
    importance = np.asarray(importance)
    n = importance.shape[0]
    fig, ax = plt.subplots(figsize=(max(6.0, min(14.0, n * 0.12)), 3.6))
    ax.bar(np.arange(n), importance, width=0.85, color="#2c7fb8")
    ax.set_xlabel("access point")
    ax.set_ylabel("importance")
    ax.set_ylim(0.0, 1.0)
    if n <= 30:
        ax.set_xticks(np.arange(n))
        ax.set_xticklabels(ap_ids, rotation=90, fontsize=7)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_redundancy_figure(matrix, path: str) -> str:
    """Heat map of the pairwise redundancy matrix."""
    matrix = np.asarray(matrix)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    im = ax.imshow(matrix, cmap="viridis", vmin=0.0, vmax=1.0, interpolation="nearest")
    ax.set_xlabel("access point")
    ax.set_ylabel("access point")
    fig.colorbar(im, ax=ax, label="|correlation|")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_trace_figure(trace, path: str) -> str:
    """Selected count (red line) and accuracy (blue bars) per iteration/alpha.

    Sweeps are plotted against alpha; searches against the iteration index.
    """
    its = trace.iterations
    sweep = trace.mode == "sweep"
    xs = [it.alpha for it in its] if sweep else [it.index for it in its]
    accs = [it.accuracy for it in its]
    ks = [it.k for it in its]
    width = (min(np.diff(xs)) * 0.8 if len(xs) > 1 else 0.05) if sweep else 0.6
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.bar(xs, accs, width=width, color="#6baed6", label="accuracy")
    ax.axhline(trace.base_accuracy, color="#08519c", linestyle="--", linewidth=1,
               label="all-AP accuracy")
    ax.set_xlabel("alpha" if sweep else "iteration")
    ax.set_ylabel("floor accuracy")
    ax.set_ylim(0.0, 1.05)
    ax2 = ax.twinx()
    ax2.plot(xs, ks, color="#de2d26", marker="o", label="selected APs")
    ax2.set_ylabel("selected APs")
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_bench_figure(names, seconds, path: str) -> str:
    """Log-scale wall-time comparison across solvers."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.bar(names, seconds, color="#756bb1")
    ax.set_yscale("log")
    ax.set_ylabel("search wall time (s)")
    ax.grid(axis="y", alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
