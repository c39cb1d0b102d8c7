"""Figure rendering for trace files and experiment summaries."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .benchmarks import BenchmarkSpec, evaluate
from .harness import failure_counts

_BRANCH_STYLE = {"forward": ("tab:blue", "o"), "backward": ("tab:red", "s")}


def plot_trace(trace_rows, path, spec: BenchmarkSpec | None = None) -> None:
    """2-D trace plot: points per branch, over objective contours if given."""
    rows = list(trace_rows)
    if not rows:
        raise ValueError("cannot plot an empty trace")
    if rows[0].x.shape[0] != 2:
        raise ValueError("trace plotting supports 2-D objectives only")

    fig, ax = plt.subplots(figsize=(7, 5.5))
    if spec is not None:
        g1 = np.linspace(spec.lower[0], spec.upper[0], 200)
        g2 = np.linspace(spec.lower[1], spec.upper[1], 200)
        zz = np.array([[evaluate(spec, np.array([a, b])) for a in g1] for b in g2])
        cf = ax.contourf(g1, g2, zz, levels=30, cmap="viridis")
        fig.colorbar(cf, ax=ax, label="phi")
        for am in spec.known_argmax:
            ax.plot(am[0], am[1], "w*", markersize=14, markeredgecolor="k")

    for branch, (color, marker) in _BRANCH_STYLE.items():
        pts = np.array([r.x for r in rows if r.branch == branch])
        if pts.size:
            ax.plot(pts[:, 0], pts[:, 1], marker=marker, color=color, markersize=3,
                    linewidth=0.8, alpha=0.85, label=branch)
    start = rows[0].x
    ax.plot(start[0], start[1], "k^", markersize=9, label="start")
    ax.set_xlabel("x_1")
    ax.set_ylabel("x_2")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_failures(records, path) -> None:
    """Bar chart of failure counts per function, grouped by algorithm."""
    counts = failure_counts(records)
    functions = sorted({fn for fn, _ in counts})
    algorithms = sorted({algo for _, algo in counts})
    if not functions:
        raise ValueError("no records to plot")

    width = 0.8 / len(algorithms)
    xs = np.arange(len(functions))
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(functions) * len(algorithms)), 4))
    for i, algo in enumerate(algorithms):
        heights = [counts.get((fn, algo), 0) for fn in functions]
        ax.bar(xs + i * width, heights, width, label=algo)
    ax.set_xticks(xs + 0.4 - width / 2)
    ax.set_xticklabels(functions, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("failures")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
