"""Matplotlib renderings of experiment reports and score distributions."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import ScoredPrediction
from .scorer import CLASS_ORDER

_CLASS_COLORS = {"strong": "#2a6f97", "weak": "#e8a13a", "irrelevant": "#767676"}


def render_confusion(matrix: dict[str, dict[str, int]], title: str, path: str | Path) -> Path:
    """Draw a 3x3 annotated heatmap, reference classes as rows."""
    path = Path(path)
    grid = [[matrix[row][col] for col in CLASS_ORDER] for row in CLASS_ORDER]
    peak = max(max(row) for row in grid)
    fig, ax = plt.subplots(figsize=(4.4, 3.8))
    image = ax.imshow(grid, cmap="Blues")
    ax.set_xticks(range(len(CLASS_ORDER)), [c.capitalize() for c in CLASS_ORDER])
    ax.set_yticks(range(len(CLASS_ORDER)), [c.capitalize() for c in CLASS_ORDER])
    ax.set_xlabel("Predicted")
    ax.set_ylabel("Reference")
    ax.set_title(title)
    for i, row in enumerate(grid):
        for j, value in enumerate(row):
            color = "white" if peak and value > 0.6 * peak else "black"
            ax.text(j, i, str(value), ha="center", va="center", color=color)
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_experiment_figures(report: dict, out_dir: str | Path) -> list[Path]:
    """Write the report's figures into out_dir and return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    fig, ax = plt.subplots(figsize=(4.0, 3.2))
    bars = ax.bar(
        ("mix", "query-focused only"),
        (report["auc_mix"], report["auc_qf_only"]),
        color=("#2a6f97", "#b85b2e"),
        width=0.55,
    )
    ax.set_ylim(0.0, 1.0)
    ax.set_ylabel("pairwise AUC")
    ax.set_title("Summary structure vs ranking quality")
    ax.bar_label(bars, fmt="%.3f")
    fig.tight_layout()
    auc_path = out / "auc_comparison.png"
    fig.savefig(auc_path, dpi=150)
    plt.close(fig)
    written.append(auc_path)

    written.append(render_confusion(report["confusion_mix"], "Mix scorer", out / "confusion_mix.png"))
    written.append(
        render_confusion(
            report["confusion_qf_only"], "Query-focused-only scorer", out / "confusion_qf_only.png"
        )
    )
    return written


def render_score_histogram(predictions: Iterable[ScoredPrediction], path: str | Path) -> Path:
    """Overlay per-class histograms of predicted scores."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    items = list(predictions)
    for name in CLASS_ORDER:
        scores = [p.predicted_score for p in items if p.reference.value == name]
        if scores:
            ax.hist(scores, bins=20, alpha=0.6, label=name, color=_CLASS_COLORS[name])
    ax.set_xlabel("predicted score")
    ax.set_ylabel("pairs")
    ax.set_title("Scores by reference class")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
