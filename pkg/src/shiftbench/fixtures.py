"""Shipped reference benchmark results and demo inputs.

Benchmark accuracy and AP cells come from training runs that are far outside
desk scale (ten CNN classifiers and FasterRCNN variants on the DAWN and WEDGE
datasets), so they ship as data files; this package recomputes every aggregate
from them. Model ids M1..M10 map onto the benchmark architectures via
``MODEL_ARCHITECTURES``.

Files under ``shiftbench/data``:

* ``classification_shift_accuracy.csv`` — test accuracy (%) per training
  regime ("80"/"50"/"20" split tags plus the "t-rain" augmented regime),
  shift scenario id and model.
* ``classification_limited_data.csv`` — per-split training benchmark with
  per-class F1 columns.
* ``detection_benchmark.csv`` — per-class APs with the published T-4 AP and
  mAP aggregates per model/training/dataset row.
* ``pedestrian_detection_ap.csv`` — pedestrian AP per weather condition on
  the real (DAWN) and synthetic (WEDGE) evaluation sets.
* ``demo/`` — a small synthetic end-to-end suite (manifests, predictions,
  embeddings, config) exercising the full pipeline in seconds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .metrics import ClassificationReport
from .suite import ResultsGrid

MODEL_ARCHITECTURES = {
    "M1": "xception",
    "M2": "vgg16",
    "M3": "vgg19",
    "M4": "resnet50",
    "M5": "mobilenet",
    "M6": "densenet",
    "M7": "inceptionv3",
    "M8": "mobilenetv2",
    "M9": "efficientnetv2s",
    "M10": "convnextsmall",
}

DETECTION_CLASS_COLUMNS = ("car", "person", "bus", "truck", "motorcycle", "bicycle", "van")


def data_path(name: str) -> Path:
    return Path(resources.files("shiftbench").joinpath("data", name))  # type: ignore[arg-type]


def demo_path(name: str = "") -> Path:
    return Path(resources.files("shiftbench").joinpath("data", "demo", name))  # type: ignore[arg-type]


def load_accuracy_grid(path=None) -> ResultsGrid:
    """Load a wide accuracy fixture (split,shift,M1..M10; cells in %) as a
    results grid with accuracy-only reports."""
    path = Path(path) if path is not None else data_path("classification_shift_accuracy.csv")
    grid = ResultsGrid(metadata={"source": path.name})
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["split", "shift"]:
            raise ValidationError(f"{path}: header must start with split,shift")
        models = header[2:]
        if not models:
            raise ValidationError(f"{path}: no model columns")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}:{row_no}: expected {len(header)} fields")
            tag, shift = row[0], int(row[1])
            for model, cell in zip(models, row[2:]):
                grid.add((tag, shift, model), ClassificationReport(accuracy=float(cell) / 100))
    return grid


@dataclass(frozen=True)
class DetectionBenchmarkRow:
    """One fixture row: per-class APs plus the published aggregates (in %)."""

    model: str
    training: str
    dataset: str
    per_class: dict[str, float]
    t4_ap: float | None
    map: float | None

    @property
    def fully_populated(self) -> bool:
        return bool(self.per_class) and self.map is not None


def load_detection_benchmark(path=None) -> list[DetectionBenchmarkRow]:
    path = Path(path) if path is not None else data_path("detection_benchmark.csv")
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for record in csv.DictReader(fh):
            per_class = {
                cls: float(record[cls])
                for cls in DETECTION_CLASS_COLUMNS
                if record.get(cls, "") != ""
            }
            rows.append(
                DetectionBenchmarkRow(
                    model=record["model"],
                    training=record["training"],
                    dataset=record["dataset"],
                    per_class=per_class,
                    t4_ap=float(record["t4_ap"]) if record.get("t4_ap") else None,
                    map=float(record["map"]) if record.get("map") else None,
                )
            )
    if not rows:
        raise ValidationError(f"{path}: empty detection benchmark fixture")
    return rows


def load_pedestrian_ap(path=None) -> dict[str, dict[str, float]]:
    """weather -> {"dawn": ap, "wedge": ap} (percent)."""
    path = Path(path) if path is not None else data_path("pedestrian_detection_ap.csv")
    table = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for record in csv.DictReader(fh):
            table[record["weather"]] = {
                "dawn": float(record["dawn_ap"]),
                "wedge": float(record["wedge_ap"]),
            }
    if not table:
        raise ValidationError(f"{path}: empty pedestrian AP fixture")
    return table


def load_limited_data_benchmark(path=None) -> list[dict]:
    path = Path(path) if path is not None else data_path("classification_limited_data.csv")
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [dict(r) for r in csv.DictReader(fh)]
    if not rows:
        raise ValidationError(f"{path}: empty limited-data fixture")
    return rows
