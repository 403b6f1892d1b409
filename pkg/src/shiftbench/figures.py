"""Figure rendering for the report path.

Renders the grid to PNG files next to the delimited output: an accuracy-vs-
shift line chart (one line per split/model series) and, when both compared
split tags are present, a per-shift improvement bar chart. Uses the Agg
backend and fixed savefig metadata so reruns produce identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .suite import (
    DEFAULT_BASELINE_TAG,
    DEFAULT_TREATED_TAG,
    ResultsGrid,
    improvement_summary,
    natural_key,
)

_SAVE_KW = {"dpi": 150, "metadata": {"Software": "shiftbench"}}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def accuracy_figure(grid: ResultsGrid, path) -> Path:
    """Accuracy (%) against shift id, one line per (split tag, model)."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 5))
    tags = sorted(grid.split_tags(), key=natural_key)
    models = grid.model_ids()
    styles = ["-", "--", ":", "-."]
    cmap = plt.get_cmap("tab10")
    for t_idx, tag in enumerate(tags):
        for m_idx, model in enumerate(models):
            xs, ys = [], []
            for shift in grid.shift_ids():
                rep = grid.rows.get((tag, shift, model))
                if rep is not None:
                    xs.append(shift)
                    ys.append(rep.accuracy * 100)
            if xs:
                ax.plot(
                    xs,
                    ys,
                    styles[t_idx % len(styles)],
                    color=cmap(m_idx % 10),
                    label=f"{tag}/{model}",
                    linewidth=1.2,
                )
    ax.set_xlabel("shift scenario id")
    ax.set_ylabel("test accuracy (%)")
    ax.set_xticks(grid.shift_ids())
    ax.grid(True, alpha=0.3)
    n_series = len(tags) * len(models)
    ax.legend(fontsize="x-small", ncol=max(1, n_series // 10 + 1))
    fig.tight_layout()
    return _save(fig, path)


def improvement_figure(
    grid: ResultsGrid,
    path,
    baseline_tag: str = DEFAULT_BASELINE_TAG,
    treated_tag: str = DEFAULT_TREATED_TAG,
) -> Path:
    """Per-shift mean accuracy delta between two split tags, as bars."""
    path = Path(path)
    deltas = improvement_summary(grid.slice(baseline_tag), grid.slice(treated_tag))
    shifts = sorted(deltas)
    values = [deltas[s] for s in shifts]
    fig, ax = plt.subplots(figsize=(6, 4))
    colors = ["#2a7" if v >= 0 else "#c33" for v in values]
    ax.bar([str(s) for s in shifts], values, color=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("shift scenario id")
    ax.set_ylabel(f"mean accuracy delta ({treated_tag} - {baseline_tag}, pp)")
    for x, v in zip(range(len(shifts)), values):
        ax.annotate(f"{v:+.1f}", (x, v), ha="center", va="bottom" if v >= 0 else "top")
    fig.tight_layout()
    return _save(fig, path)


def render_grid_figures(
    grid: ResultsGrid,
    out_dir,
    baseline_tag: str = DEFAULT_BASELINE_TAG,
    treated_tag: str = DEFAULT_TREATED_TAG,
) -> list[Path]:
    """Render every figure the grid supports into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [accuracy_figure(grid, out_dir / "accuracy_by_shift.png")]
    tags = set(grid.split_tags())
    if baseline_tag in tags and treated_tag in tags:
        written.append(
            improvement_figure(
                grid,
                out_dir / "improvement_by_shift.png",
                baseline_tag=baseline_tag,
                treated_tag=treated_tag,
            )
        )
    return written
