"""Dataset manifests: the labelled sample collections everything else consumes.

A manifest is persisted as JSON Lines, one sample object per line, UTF-8 with
LF endings. Per-line schema::

    {"id": str, "class": str, "split": "train"|"test",
     "source": "real"|"synthetic",
     "prompt_keywords": [str]?, "embedding_ref": str?,
     "boxes": [{"class": str, "x1": num, "y1": num, "x2": num, "y2": num}]?}

Optional keys are omitted when absent. Sample order is the file line order and
survives a save/load round trip. Class names are canonicalised to lower-case.
The manifest name is not stored in the file; ``load_manifest`` names the
manifest after the file stem, so the class set and name are derived state.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ManifestParseError, ValidationError

SPLITS = ("train", "test")
SOURCES = ("real", "synthetic")


def canonical_class(name: str) -> str:
    """Lower-cased, stripped class name; rejects empty names."""
    canon = name.strip().lower()
    if not canon:
        raise ValidationError("class name is empty after trimming whitespace")
    return canon


@dataclass(frozen=True)
class Box:
    """Axis-aligned ground-truth box with its object class."""

    class_name: str
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        object.__setattr__(self, "class_name", canonical_class(self.class_name))
        if not (self.x2 > self.x1 and self.y2 > self.y1):
            raise ValidationError(
                f"malformed box ({self.x1},{self.y1},{self.x2},{self.y2}): "
                "requires x2 > x1 and y2 > y1"
            )

    def coords(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


@dataclass(frozen=True)
class Sample:
    id: str
    class_name: str
    split: str
    source: str
    prompt_keywords: tuple[str, ...] | None = None
    embedding_ref: str | None = None
    boxes: tuple[Box, ...] | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("sample id must be a non-empty string")
        object.__setattr__(self, "class_name", canonical_class(self.class_name))
        if self.split not in SPLITS:
            raise ValidationError(f"sample {self.id!r}: unknown split {self.split!r}")
        if self.source not in SOURCES:
            raise ValidationError(f"sample {self.id!r}: unknown source {self.source!r}")
        if self.prompt_keywords is not None:
            object.__setattr__(self, "prompt_keywords", tuple(self.prompt_keywords))
        if self.boxes is not None:
            object.__setattr__(self, "boxes", tuple(self.boxes))
        if (
            self.source == "synthetic"
            and not self.prompt_keywords
            and self.embedding_ref is None
        ):
            raise ValidationError(
                f"synthetic sample {self.id!r} needs prompt_keywords or an "
                "embedding_ref, otherwise it cannot be scored"
            )

    def scorable(self) -> bool:
        return bool(self.prompt_keywords) or self.embedding_ref is not None


@dataclass(frozen=True)
class DatasetManifest:
    """Ordered, validated sample collection with its class set."""

    name: str
    samples: tuple[Sample, ...]
    classes: frozenset[str] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        derived = frozenset(s.class_name for s in self.samples)
        if self.classes is None:
            object.__setattr__(self, "classes", derived)
        else:
            object.__setattr__(self, "classes", frozenset(self.classes))
            if not derived <= self.classes:
                raise ValidationError(
                    f"manifest {self.name!r}: samples use classes outside the "
                    f"declared class set: {sorted(derived - self.classes)}"
                )
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise ValidationError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.samples)

    def split_samples(self, split: str) -> tuple[Sample, ...]:
        if split not in SPLITS:
            raise ValidationError(f"unknown split {split!r}")
        return tuple(s for s in self.samples if s.split == split)

    def class_list(self) -> list[str]:
        """Canonical (sorted) class order used for all deterministic iteration."""
        return sorted(self.classes)


@dataclass(frozen=True)
class LabelDistribution:
    """Per-class non-negative sample counts over a fixed class set."""

    counts: dict[str, int]

    def __post_init__(self):
        clean = {}
        for name, count in sorted(self.counts.items()):
            canon = canonical_class(name)
            if not isinstance(count, int) or count < 0:
                raise ValidationError(
                    f"count for class {canon!r} must be a non-negative integer"
                )
            clean[canon] = count
        object.__setattr__(self, "counts", clean)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def class_list(self) -> list[str]:
        return sorted(self.counts)

    def normalized(self) -> dict[str, float]:
        if self.total == 0:
            raise ValidationError("cannot normalize an empty distribution")
        return {c: n / self.total for c, n in self.counts.items()}


def _sample_from_obj(obj: dict, path, line_no: int) -> Sample:
    if not isinstance(obj, dict):
        raise ManifestParseError(path, line_no, "line is not a JSON object")
    required = {"id", "class", "split", "source"}
    missing = required - obj.keys()
    if missing:
        raise ManifestParseError(path, line_no, f"missing keys {sorted(missing)}")
    boxes = None
    if obj.get("boxes") is not None:
        boxes = tuple(
            Box(b["class"], b["x1"], b["y1"], b["x2"], b["y2"]) for b in obj["boxes"]
        )
    keywords = obj.get("prompt_keywords")
    return Sample(
        id=str(obj["id"]),
        class_name=obj["class"],
        split=obj["split"],
        source=obj["source"],
        prompt_keywords=tuple(keywords) if keywords is not None else None,
        embedding_ref=obj.get("embedding_ref"),
        boxes=boxes,
    )


def load_manifest(path) -> DatasetManifest:
    """Load a JSON-Lines manifest; sample order equals file line order.

    Raises ManifestParseError naming the offending line, and ValidationError
    for duplicate ids or unknown enum values. Blank lines are ignored but
    every non-blank line yields exactly one sample.
    """
    path = Path(path)
    samples = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestParseError(path, line_no, f"invalid JSON: {exc.msg}") from exc
            try:
                sample = _sample_from_obj(obj, path, line_no)
            except ValidationError as exc:
                if isinstance(exc, ManifestParseError):
                    raise
                raise ManifestParseError(path, line_no, str(exc)) from exc
            if sample.id in seen_ids:
                raise ValidationError(
                    f"{path}:{line_no}: duplicate sample id {sample.id!r}"
                )
            seen_ids.add(sample.id)
            samples.append(sample)
    return DatasetManifest(name=path.stem, samples=tuple(samples))


def _sample_to_obj(sample: Sample) -> dict:
    obj = {
        "id": sample.id,
        "class": sample.class_name,
        "split": sample.split,
        "source": sample.source,
    }
    if sample.prompt_keywords is not None:
        obj["prompt_keywords"] = list(sample.prompt_keywords)
    if sample.embedding_ref is not None:
        obj["embedding_ref"] = sample.embedding_ref
    if sample.boxes is not None:
        obj["boxes"] = [
            {"class": b.class_name, "x1": b.x1, "y1": b.y1, "x2": b.x2, "y2": b.y2}
            for b in sample.boxes
        ]
    return obj


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write the manifest atomically (temp file + rename), one line per sample."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            for sample in manifest.samples:
                fh.write(json.dumps(_sample_to_obj(sample), ensure_ascii=False))
                fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise OSError(f"failed to write manifest to {path}: {exc}") from exc


def label_distribution(manifest: DatasetManifest, split: str) -> LabelDistribution:
    """Per-class counts for one split, keyed by the manifest's full class set."""
    counts = {c: 0 for c in manifest.classes}
    for sample in manifest.split_samples(split):
        counts[sample.class_name] += 1
    return LabelDistribution(counts)


def make_sample(sample: Sample, **changes) -> Sample:
    """Copy a sample with field changes (re-runs validation)."""
    return replace(sample, **changes)
