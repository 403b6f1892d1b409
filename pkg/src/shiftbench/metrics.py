"""Classification and detection metrics.

Classification: confusion matrix, per-class precision/recall/F1 with the
zero-denominator-is-zero convention, macro averages, accuracy.

Detection: IoU box matching and average precision. Detections are ranked by
descending confidence (ties broken by image id, then box coordinates, then
class, so results never depend on input order). A detection is a true
positive when its best-IoU unmatched ground-truth box in the same image
reaches the IoU threshold; that box is then consumed; everything else is a
false positive. AP integrates the precision envelope over recall
(all-point interpolation by default; the 11-point variant is available for
comparison). mAP is the unweighted mean over classes with defined AP.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CoverageError, UndefinedReportError, ValidationError
from .manifest import DatasetManifest, canonical_class

log = logging.getLogger(__name__)

T4_CLASSES = ("car", "person", "bus", "truck")


@dataclass(frozen=True)
class ConfusionMatrix:
    """cells[t][p] counts samples of true class t predicted as class p."""

    classes: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.classes)
        if len(self.cells) != n or any(len(row) != n for row in self.cells):
            raise ValidationError("confusion matrix must be square over the class list")
        if any(v < 0 for row in self.cells for v in row):
            raise ValidationError("confusion matrix cells must be non-negative")

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.cells)

    def row_sum(self, i: int) -> int:
        return sum(self.cells[i])

    def col_sum(self, j: int) -> int:
        return sum(row[j] for row in self.cells)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassificationReport:
    accuracy: float
    per_class: dict[str, ClassMetrics] = field(default_factory=dict)
    macro_precision: float | None = None
    macro_recall: float | None = None
    macro_f1: float | None = None


def confusion_matrix(truths, preds, classes) -> ConfusionMatrix:
    truths = [canonical_class(t) for t in truths]
    preds = [canonical_class(p) for p in preds]
    classes = tuple(canonical_class(c) for c in classes)
    if len(truths) != len(preds):
        raise ValidationError(
            f"truth/prediction length mismatch: {len(truths)} vs {len(preds)}"
        )
    index = {c: i for i, c in enumerate(classes)}
    if len(index) != len(classes):
        raise ValidationError("class list contains duplicates")
    cells = [[0] * len(classes) for _ in classes]
    for t, p in zip(truths, preds):
        if t not in index:
            raise ValidationError(f"unknown true label {t!r}")
        if p not in index:
            raise ValidationError(f"unknown predicted label {p!r}")
        cells[index[t]][index[p]] += 1
    return ConfusionMatrix(classes=classes, cells=tuple(tuple(row) for row in cells))


def classification_report(cm: ConfusionMatrix) -> ClassificationReport:
    """Accuracy, per-class precision/recall/F1 and their macro means.

    precision_c = cells[c][c] / column sum, recall_c = cells[c][c] / row sum,
    each 0 when its denominator is 0; F1 is the harmonic mean, 0 when
    precision + recall = 0.
    """
    total = cm.total
    if total == 0:
        raise UndefinedReportError("no evaluated samples; report undefined")
    per_class = {}
    for i, name in enumerate(cm.classes):
        tp = cm.cells[i][i]
        col = cm.col_sum(i)
        row = cm.row_sum(i)
        precision = tp / col if col else 0.0
        recall = tp / row if row else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[name] = ClassMetrics(precision=precision, recall=recall, f1=f1)
    n = len(cm.classes)
    return ClassificationReport(
        accuracy=sum(cm.cells[i][i] for i in range(n)) / total,
        per_class=per_class,
        macro_precision=sum(m.precision for m in per_class.values()) / n,
        macro_recall=sum(m.recall for m in per_class.values()) / n,
        macro_f1=sum(m.f1 for m in per_class.values()) / n,
    )


def iou(a, b) -> float:
    """Intersection-over-union of two (x1, y1, x2, y2) boxes; 0 when disjoint."""
    ax1, ay1, ax2, ay2 = a
    bx1, by1, bx2, by2 = b
    if not (ax2 > ax1 and ay2 > ay1 and bx2 > bx1 and by2 > by1):
        raise ValidationError("iou() requires well-formed boxes (x2 > x1, y2 > y1)")
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return inter / union


@dataclass(frozen=True)
class DetectionRecord:
    image_id: str
    class_name: str
    box: tuple[float, float, float, float]
    confidence: float

    def __post_init__(self):
        object.__setattr__(self, "class_name", canonical_class(self.class_name))
        object.__setattr__(self, "box", tuple(float(v) for v in self.box))
        x1, y1, x2, y2 = self.box
        if not (x2 > x1 and y2 > y1):
            raise ValidationError(f"detection in {self.image_id!r}: malformed box")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"detection in {self.image_id!r}: confidence not in [0, 1]")


@dataclass(frozen=True)
class GroundTruth:
    image_id: str
    class_name: str
    box: tuple[float, float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "class_name", canonical_class(self.class_name))
        object.__setattr__(self, "box", tuple(float(v) for v in self.box))


@dataclass(frozen=True)
class APResult:
    """AP for one class; ``ap`` is None when undefined (no ground truth and
    no detections), which excludes the class from mAP."""

    class_name: str
    ap: float | None
    pr_points: tuple[tuple[float, float], ...] = ()
    tp: int = 0
    fp: int = 0
    num_gt: int = 0


def load_detections(path) -> list[DetectionRecord]:
    """Read a detection CSV ('image_id,class,x1,y1,x2,y2,confidence')."""
    path = Path(path)
    expected = ["image_id", "class", "x1", "y1", "x2", "y2", "confidence"]
    dets = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise ValidationError(f"{path}: header must be {','.join(expected)}")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 7:
                raise ValidationError(f"{path}:{row_no}: expected 7 fields")
            try:
                dets.append(
                    DetectionRecord(
                        image_id=row[0],
                        class_name=row[1],
                        box=(float(row[2]), float(row[3]), float(row[4]), float(row[5])),
                        confidence=float(row[6]),
                    )
                )
            except ValueError as exc:
                raise ValidationError(f"{path}:{row_no}: non-numeric value") from exc
    return dets


def ground_truths_from_manifest(manifest: DatasetManifest, split: str | None = None):
    """Flatten manifest sample boxes into GroundTruth records (image id =
    sample id)."""
    gts = []
    for sample in manifest.samples:
        if split is not None and sample.split != split:
            continue
        for box in sample.boxes or ():
            gts.append(GroundTruth(sample.id, box.class_name, box.coords()))
    return gts


def _det_order_key(det: DetectionRecord):
    return (-det.confidence, det.image_id, det.box, det.class_name)


def average_precision(
    dets,
    gts,
    class_name: str,
    iou_threshold: float = 0.5,
    interpolation: str = "all",
) -> APResult:
    """Average precision of one class via greedy confidence-descending matching.

    ``gts`` are GroundTruth records; detections and ground truth are filtered
    to ``class_name`` internally. With no ground truth, AP is 0.0 when
    detections exist (with a warning) and None (undefined) when there are none.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise ValidationError("iou_threshold must be in (0, 1)")
    if interpolation not in ("all", "11point"):
        raise ValidationError("interpolation must be 'all' or '11point'")
    class_name = canonical_class(class_name)
    dets = sorted((d for d in dets if d.class_name == class_name), key=_det_order_key)
    class_gts = [g for g in gts if g.class_name == class_name]
    num_gt = len(class_gts)
    if num_gt == 0:
        if not dets:
            return APResult(class_name=class_name, ap=None)
        log.warning(
            "class %r: %d detections but no ground truth; AP defined as 0",
            class_name,
            len(dets),
        )
        return APResult(class_name=class_name, ap=0.0, tp=0, fp=len(dets))

    by_image: dict[str, list[GroundTruth]] = {}
    for g in sorted(class_gts, key=lambda g: (g.image_id, g.box)):
        by_image.setdefault(g.image_id, []).append(g)
    used: dict[str, list[bool]] = {img: [False] * len(v) for img, v in by_image.items()}

    tp_flags = []
    for det in dets:
        candidates = by_image.get(det.image_id, ())
        best_iou, best_idx = 0.0, -1
        for idx, g in enumerate(candidates):
            if used[det.image_id][idx]:
                continue
            overlap = iou(det.box, g.box)
            if overlap > best_iou:
                best_iou, best_idx = overlap, idx
        if best_idx >= 0 and best_iou >= iou_threshold:
            used[det.image_id][best_idx] = True
            tp_flags.append(True)
        else:
            tp_flags.append(False)

    pr_points = []
    tp = fp = 0
    for flag in tp_flags:
        tp += flag
        fp += not flag
        pr_points.append((tp / num_gt, tp / (tp + fp)))

    if interpolation == "all":
        ap = _ap_all_point(pr_points)
    else:
        ap = _ap_11_point(pr_points)
    return APResult(
        class_name=class_name,
        ap=ap,
        pr_points=tuple(pr_points),
        tp=tp,
        fp=fp,
        num_gt=num_gt,
    )


def _ap_all_point(pr_points) -> float:
    """Area under the precision envelope: sum of (r_i - r_{i-1}) * max
    precision achieved at recall >= r_i."""
    recalls = [0.0] + [r for r, _ in pr_points]
    precisions = [0.0] + [p for _, p in pr_points]
    for i in range(len(precisions) - 2, -1, -1):
        precisions[i] = max(precisions[i], precisions[i + 1])
    ap = 0.0
    for i in range(1, len(recalls)):
        ap += (recalls[i] - recalls[i - 1]) * precisions[i]
    return ap


def _ap_11_point(pr_points) -> float:
    ap = 0.0
    for i in range(11):
        r = i / 10
        ap += max((p for rec, p in pr_points if rec >= r), default=0.0)
    return ap / 11


def mean_ap(results, subset=None) -> float:
    """Unweighted mean AP over classes with defined AP, optionally restricted
    to a class subset (e.g. T4_CLASSES for the top-4 aggregate)."""
    included = [r for r in results if r.ap is not None]
    if subset is not None:
        wanted = {canonical_class(c) for c in subset}
        included = [r for r in included if r.class_name in wanted]
    if not included:
        raise ValidationError("no classes with defined AP after filtering")
    return sum(r.ap for r in included) / len(included)


def score_predictions(
    truths_by_id: dict[str, str], preds_by_id: dict[str, str], classes
) -> ClassificationReport:
    """Confusion-matrix report for predictions keyed by sample id; every truth
    id must be covered by a prediction."""
    missing = sorted(set(truths_by_id) - set(preds_by_id))
    if missing:
        shown = ", ".join(missing[:10]) + ("..." if len(missing) > 10 else "")
        raise CoverageError(
            f"predictions missing for {len(missing)} sample ids: {shown}",
            missing_ids=missing,
        )
    ids = sorted(truths_by_id)
    cm = confusion_matrix(
        [truths_by_id[i] for i in ids], [preds_by_id[i] for i in ids], classes
    )
    return classification_report(cm)
