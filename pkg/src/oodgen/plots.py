"""Figure rendering for the CLI report paths.

Reports always write their delimited data first; these helpers render a
companion PNG next to it so a run can be eyeballed without extra
tooling. Rendering uses the Agg backend with fixed styles and no
timestamps, so repeated runs of the same data produce byte-identical
files (the determinism contract covers figures too).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150

# One fixed color per series position, repeated if a plot has more layers.
_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple", "tab:brown")


def _color(i: int) -> str:
    return _COLORS[i % len(_COLORS)]


def _finish(fig, path) -> str:
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return str(path)


def save_scatter(path, layers, title: str = "", xlabel: str = "c0", ylabel: str = "c1") -> str:
    """Overlayed 2-d scatter layers; `layers` is [(label, (n, >=2) array)].

    Only the first two columns are drawn. The first layer is rendered
    larger and more opaque (it is conventionally the reference set).
    """
    fig, ax = plt.subplots(figsize=(6, 6))
    for i, (label, points) in enumerate(layers):
        pts = np.asarray(points, dtype=float)
        size, alpha = (12, 0.8) if i == 0 else (8, 0.5)
        ax.scatter(pts[:, 0], pts[:, 1], s=size, alpha=alpha, color=_color(i),
                   label=label, linewidths=0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    return _finish(fig, path)


def save_series_preview(path, groups, max_per_group: int = 5, title: str = "") -> str:
    """First few series of each named group on a shared value axis."""
    fig, ax = plt.subplots(figsize=(8, 4))
    for i, (label, series) in enumerate(groups):
        arr = np.asarray(series, dtype=float)
        shown = arr[:max_per_group]
        t = np.arange(arr.shape[1])
        for j, row in enumerate(shown):
            ax.plot(t, row, color=_color(i), alpha=0.7, linewidth=1.0,
                    label=label if j == 0 else None)
    ax.set_xlabel("step")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right")
    fig.tight_layout()
    return _finish(fig, path)


def save_matrix_heatmap(path, matrix, labels, title: str = "") -> str:
    """Annotated heatmap of a small square matrix (distance tables)."""
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    fig, ax = plt.subplots(figsize=(1.1 * n + 2, 1.1 * n + 1.5))
    image = ax.imshow(m, cmap="viridis")
    ax.set_xticks(range(n), labels=list(labels), rotation=45, ha="right")
    ax.set_yticks(range(n), labels=list(labels))
    mid = (m.max() + m.min()) / 2.0
    for i in range(n):
        for j in range(n):
            color = "white" if m[i, j] < mid else "black"
            ax.text(j, i, f"{m[i, j]:.3f}", ha="center", va="center",
                    color=color, fontsize=9)
    if title:
        ax.set_title(title)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    return _finish(fig, path)


def save_histograms(path, entries, marker: float | None = None, xlabel: str = "",
                    title: str = "") -> str:
    """Step histograms on shared bins; `entries` is [(label, edges, counts)].

    `marker` draws a dashed vertical reference line (e.g. a distance
    target the histogram is expected to straddle).
    """
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, (label, edges, counts) in enumerate(entries):
        edges = np.asarray(edges, dtype=float)
        counts = np.asarray(counts, dtype=float)
        ax.stairs(counts, edges, color=_color(i), label=label, linewidth=1.5)
    if marker is not None:
        ax.axvline(marker, color="black", linestyle="--", linewidth=1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    fig.tight_layout()
    return _finish(fig, path)


def save_roc(path, curves, title: str = "") -> str:
    """ROC curves; `curves` is [(label, fpr, tpr)]. Adds the chance line."""
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, 1], [0, 1], color="gray", linestyle=":", linewidth=1.0)
    for i, (label, fpr, tpr) in enumerate(curves):
        ax.plot(fpr, tpr, color=_color(i), label=label, linewidth=1.5)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    return _finish(fig, path)
