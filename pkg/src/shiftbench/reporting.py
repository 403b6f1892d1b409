"""Deterministic result emission: CSV/JSON/markdown grids and plot-series data.

All writers sort keys and format floats with ``repr`` so identical grids
produce identical bytes. Timestamps never appear in these files; they live
only in the run metadata.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

from .errors import ValidationError
from .metrics import ClassificationReport
from .suite import (
    DEFAULT_BASELINE_TAG,
    DEFAULT_TREATED_TAG,
    ResultsGrid,
    improvement_summary,
    natural_key,
)

FORMATS = ("csv", "json", "markdown")

_CSV_HEADER = [
    "split",
    "shift",
    "model",
    "accuracy",
    "macro_precision",
    "macro_recall",
    "macro_f1",
]


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def grid_to_csv(grid: ResultsGrid, path) -> Path:
    """Long-format scalar view of the grid (per-class metrics live in JSON)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_HEADER)
        for tag, shift, model in grid.sorted_keys():
            rep = grid.rows[(tag, shift, model)]
            writer.writerow(
                [
                    tag,
                    shift,
                    model,
                    _fmt(rep.accuracy),
                    _fmt(rep.macro_precision),
                    _fmt(rep.macro_recall),
                    _fmt(rep.macro_f1),
                ]
            )
    return path


def grid_from_csv(path) -> ResultsGrid:
    path = Path(path)
    grid = ResultsGrid()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _CSV_HEADER:
            raise ValidationError(f"{path}: unexpected grid header {header!r}")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_CSV_HEADER):
                raise ValidationError(f"{path}:{row_no}: expected {len(_CSV_HEADER)} fields")
            tag, shift, model, acc, mp, mr, mf = row
            grid.add(
                (tag, int(shift), model),
                ClassificationReport(
                    accuracy=float(acc),
                    macro_precision=float(mp) if mp else None,
                    macro_recall=float(mr) if mr else None,
                    macro_f1=float(mf) if mf else None,
                ),
            )
    return grid


def _report_obj(rep: ClassificationReport) -> dict:
    obj = {
        "accuracy": rep.accuracy,
        "macro_precision": rep.macro_precision,
        "macro_recall": rep.macro_recall,
        "macro_f1": rep.macro_f1,
    }
    if rep.per_class:
        obj["per_class"] = {c: asdict(m) for c, m in sorted(rep.per_class.items())}
    return obj


def grid_to_json(grid: ResultsGrid, path) -> Path:
    """Lossless grid dump; metadata included without timestamps."""
    path = Path(path)
    meta = {k: v for k, v in grid.metadata.items() if k != "created_utc"}
    rows = [
        {"split": tag, "shift": shift, "model": model, "report": _report_obj(grid.rows[(tag, shift, model)])}
        for tag, shift, model in grid.sorted_keys()
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"metadata": meta, "rows": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _pct(value: float) -> str:
    text = f"{value * 100:.1f}"
    return text[:-2] if text.endswith(".0") else text


def grid_to_markdown(grid: ResultsGrid, path) -> Path:
    """Accuracy table with (split, shift) rows and model columns."""
    path = Path(path)
    models = grid.model_ids()
    lines = ["| split | shift | " + " | ".join(models) + " |"]
    lines.append("|" + " --- |" * (2 + len(models)))
    for tag in sorted(grid.split_tags(), key=natural_key):
        for shift in grid.shift_ids():
            cells = []
            for model in models:
                rep = grid.rows.get((tag, shift, model))
                cells.append(_pct(rep.accuracy) if rep is not None else "-")
            lines.append(f"| {tag} | {shift} | " + " | ".join(cells) + " |")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def emit_report(grid: ResultsGrid, fmt: str, out_dir) -> list[Path]:
    """Write the grid in one format into ``out_dir``; returns written paths."""
    if not grid.rows:
        raise ValidationError("cannot emit an empty grid")
    if fmt not in FORMATS:
        raise ValidationError(f"unknown report format {fmt!r} (expected {FORMATS})")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        return [grid_to_csv(grid, out_dir / "grid.csv")]
    if fmt == "json":
        return [grid_to_json(grid, out_dir / "grid.json")]
    return [grid_to_markdown(grid, out_dir / "grid.md")]


def plot_data(
    grid: ResultsGrid,
    path,
    baseline_tag: str = DEFAULT_BASELINE_TAG,
    treated_tag: str = DEFAULT_TREATED_TAG,
) -> Path:
    """Plot-ready series: one '<split>/<model>' accuracy series per model (x =
    shift id, y = accuracy in %), plus a 'delta' series of per-shift mean
    improvement when both the baseline and treated split tags are present.
    CSV columns: series,x,y."""
    if not grid.rows:
        raise ValidationError("cannot emit plot data for an empty grid")
    path = Path(path)
    rows: list[tuple[str, int, float]] = []
    for tag in sorted(grid.split_tags(), key=natural_key):
        for model in grid.model_ids():
            for shift in grid.shift_ids():
                rep = grid.rows.get((tag, shift, model))
                if rep is not None:
                    rows.append((f"{tag}/{model}", shift, rep.accuracy * 100))
    tags = set(grid.split_tags())
    if baseline_tag in tags and treated_tag in tags:
        deltas = improvement_summary(grid.slice(baseline_tag), grid.slice(treated_tag))
        for shift in sorted(deltas):
            rows.append(("delta", shift, deltas[shift]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["series", "x", "y"])
        for series, x, y in rows:
            writer.writerow([series, x, repr(float(y))])
    return path
