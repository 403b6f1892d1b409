"""Experiment orchestration: (split-tag x shift x model) evaluation grids.

A suite run takes a JSON config naming the evaluation manifest, the shift
scenarios and one prediction file per (split tag, model, shift); for each
scenario it resamples the evaluation split to the shifted target distribution,
scores every model's predictions restricted to the resampled sample ids, and
records one classification report per grid row.

Model predictions are consumed, never produced: training lives outside this
tool, so benchmark accuracy cells are inputs (fixtures or prediction files),
not training targets.

Config schema::

    {"real_manifest": str, "synthetic_manifest": str?, "embeddings": str?,
     "eval_split": "test"|"train", "seed": int, "out_dir": str?,
     "scenarios": "standard" | [scenario objects],
     "predictions": {split_tag: {model_id: path | {shift_id: path}}}}

Relative paths resolve against the config file's directory. Flags override
fields. Per-scenario resample seeds come from a SplitMix64 stream on the run
seed (two draws per scenario, in scenario-id order), so a run is a pure
function of (config, seed).
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CoverageError, ValidationError
from .manifest import DatasetManifest, label_distribution, load_manifest
from .metrics import ClassificationReport, score_predictions
from .rng import SplitMix64
from .shift import (
    ResamplePlan,
    ShiftScenario,
    base_sample_id,
    make_shift,
    resample,
    scenario_from_obj,
    standard_scenarios,
)

GridKey = tuple[str, int, str]  # (split_tag, shift_id, model_id)
GridSlice = dict[tuple[int, str], ClassificationReport]

DEFAULT_BASELINE_TAG = "20"
DEFAULT_TREATED_TAG = "t-rain"


@dataclass(frozen=True)
class ExperimentConfig:
    real_manifest: Path
    predictions: dict[str, dict[str, dict[int, Path]]]
    scenarios: tuple[ShiftScenario, ...]
    eval_split: str = "test"
    seed: int = 0
    out_dir: Path | None = None
    synthetic_manifest: Path | None = None
    embeddings: Path | None = None
    config_hash: str = ""

    def __post_init__(self):
        ids = [sc.id for sc in self.scenarios]
        if len(set(ids)) != len(ids):
            raise ValidationError("scenario ids must be unique")
        if not self.predictions:
            raise ValidationError("config declares no prediction files")


@dataclass
class ResultsGrid:
    rows: dict[GridKey, ClassificationReport] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def add(self, key: GridKey, report: ClassificationReport) -> None:
        if key in self.rows:
            raise ValidationError(f"duplicate grid row {key}")
        self.rows[key] = report

    def split_tags(self) -> list[str]:
        return sorted({k[0] for k in self.rows})

    def shift_ids(self) -> list[int]:
        return sorted({k[1] for k in self.rows})

    def model_ids(self) -> list[str]:
        return sorted({k[2] for k in self.rows}, key=natural_key)

    def slice(self, split_tag: str) -> GridSlice:
        out = {(s, m): rep for (tag, s, m), rep in self.rows.items() if tag == split_tag}
        if not out:
            raise ValidationError(f"grid has no rows for split tag {split_tag!r}")
        return out

    def sorted_keys(self) -> list[GridKey]:
        return sorted(self.rows)


def natural_key(text: str):
    """Sort key treating digit runs numerically, so M2 sorts before M10."""
    parts = []
    buf = ""
    for ch in text:
        if ch.isdigit():
            buf += ch
        else:
            if buf:
                parts.append((1, int(buf)))
                buf = ""
            parts.append((0, ch))
    if buf:
        parts.append((1, int(buf)))
    return parts


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_config(path, seed_override: int | None = None, out_override=None) -> ExperimentConfig:
    """Parse a config file; see the module docstring for the schema."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    base = path.parent

    def resolve(p):
        return (base / p).resolve() if p is not None else None

    scenarios_field = raw.get("scenarios", "standard")
    if scenarios_field == "standard":
        scenarios = standard_scenarios()
    else:
        scenarios = [scenario_from_obj(obj) for obj in scenarios_field]
    scenario_ids = [sc.id for sc in scenarios]

    raw_preds = raw.get("predictions")
    if not isinstance(raw_preds, dict) or not raw_preds:
        raise ValidationError(f"{path}: 'predictions' must be a non-empty object")
    predictions: dict[str, dict[str, dict[int, Path]]] = {}
    for tag, models in raw_preds.items():
        if not isinstance(models, dict) or not models:
            raise ValidationError(f"{path}: predictions[{tag!r}] must be a non-empty object")
        predictions[tag] = {}
        for model, spec in models.items():
            if isinstance(spec, str):
                per_shift = {sid: resolve(spec) for sid in scenario_ids}
            elif isinstance(spec, dict):
                per_shift = {}
                for sid_str, p in spec.items():
                    sid = int(sid_str)
                    if sid not in scenario_ids:
                        raise ValidationError(
                            f"{path}: predictions[{tag!r}][{model!r}] names shift {sid}, "
                            f"not among scenario ids {scenario_ids}"
                        )
                    per_shift[sid] = resolve(p)
                missing = set(scenario_ids) - set(per_shift)
                if missing:
                    raise ValidationError(
                        f"{path}: predictions[{tag!r}][{model!r}] missing shifts {sorted(missing)}"
                    )
            else:
                raise ValidationError(
                    f"{path}: predictions[{tag!r}][{model!r}] must be a path or shift map"
                )
            predictions[tag][model] = per_shift

    if "real_manifest" not in raw:
        raise ValidationError(f"{path}: config missing 'real_manifest'")
    seed = int(raw.get("seed", 0)) if seed_override is None else seed_override
    out_dir = out_override if out_override is not None else raw.get("out_dir")
    eval_split = raw.get("eval_split", "test")
    return ExperimentConfig(
        real_manifest=resolve(raw["real_manifest"]),
        predictions=predictions,
        scenarios=tuple(scenarios),
        eval_split=eval_split,
        seed=seed,
        out_dir=Path(out_dir) if out_dir is not None else None,
        synthetic_manifest=resolve(raw.get("synthetic_manifest")),
        embeddings=resolve(raw.get("embeddings")),
        config_hash=hashlib.sha256(_canonical_json(raw).encode("utf-8")).hexdigest(),
    )


def load_predictions(path) -> dict[str, str]:
    """Read a classification prediction CSV ('sample_id,predicted_class')."""
    path = Path(path)
    preds = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["sample_id", "predicted_class"]:
            raise ValidationError(f"{path}: header must be sample_id,predicted_class")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}:{row_no}: expected 2 fields")
            sid, cls = row
            if sid in preds:
                raise ValidationError(f"{path}:{row_no}: duplicate sample id {sid!r}")
            preds[sid] = cls
    return preds


def shifted_eval_manifests(cfg: ExperimentConfig, real: DatasetManifest):
    """Resample the evaluation split once per scenario (shared across models).

    Yields (scenario, target distribution, resampled manifest). Replacement is
    used only for classes whose target exceeds availability.
    """
    base = label_distribution(real, cfg.eval_split)
    if base.total == 0:
        raise ValidationError(
            f"manifest {real.name!r} has an empty {cfg.eval_split!r} split"
        )
    seeds = SplitMix64(cfg.seed)
    for scenario in sorted(cfg.scenarios, key=lambda s: s.id):
        shift_seed = seeds.next()
        resample_seed = seeds.next()
        target = make_shift(scenario, base, shift_seed)
        needs_replacement = any(
            target.counts[c] > base.counts.get(c, 0) for c in target.counts
        )
        plan = ResamplePlan(target=target, with_replacement=needs_replacement, seed=resample_seed)
        yield scenario, target, resample(real, plan, cfg.eval_split)


def run_shift_suite(cfg: ExperimentConfig) -> ResultsGrid:
    """Evaluate every (split tag, shift, model) cell of the configured grid."""
    real = load_manifest(cfg.real_manifest)
    classes = real.class_list()
    grid = ResultsGrid(metadata={"seed": cfg.seed, "config_hash": cfg.config_hash})

    pred_cache: dict[Path, dict[str, str]] = {}

    def predictions_for(path: Path) -> dict[str, str]:
        if path not in pred_cache:
            pred_cache[path] = load_predictions(path)
        return pred_cache[path]

    for scenario, _target, shifted in shifted_eval_manifests(cfg, real):
        eval_samples = shifted.split_samples(cfg.eval_split)
        truths = {s.id: s.class_name for s in eval_samples}
        for tag in sorted(cfg.predictions):
            for model in sorted(cfg.predictions[tag], key=natural_key):
                pred_file = cfg.predictions[tag][model][scenario.id]
                by_id = predictions_for(pred_file)
                preds = {}
                missing = []
                for sid in truths:
                    base_id = base_sample_id(sid)
                    if base_id in by_id:
                        preds[sid] = by_id[base_id]
                    else:
                        missing.append(sid)
                if missing:
                    shown = ", ".join(sorted(missing)[:10])
                    raise CoverageError(
                        f"{pred_file}: missing predictions for {len(missing)} "
                        f"resampled ids (shift {scenario.id}, model {model!r}): {shown}",
                        missing_ids=sorted(missing),
                    )
                grid.add((tag, scenario.id, model), score_predictions(truths, preds, classes))
    return grid


def improvement_summary(baseline: GridSlice, treated: GridSlice) -> dict[int, float]:
    """Per-shift mean accuracy delta (treated - baseline) in percentage points,
    rounded to 0.1. Both slices must cover identical (shift, model) keys."""
    if set(baseline) != set(treated):
        only_b = sorted(set(baseline) - set(treated))
        only_t = sorted(set(treated) - set(baseline))
        raise ValidationError(
            f"slices cover different keys (baseline-only: {only_b[:5]}, "
            f"treated-only: {only_t[:5]})"
        )
    shifts = sorted({s for s, _ in baseline})
    deltas = {}
    for shift in shifts:
        models = sorted(m for s, m in baseline if s == shift)
        base_mean = sum(baseline[(shift, m)].accuracy for m in models) / len(models)
        treat_mean = sum(treated[(shift, m)].accuracy for m in models) / len(models)
        deltas[shift] = round(treat_mean * 100 - base_mean * 100, 1)
    return deltas


def compare_grid(
    grid: ResultsGrid,
    baseline_tag: str = DEFAULT_BASELINE_TAG,
    treated_tag: str = DEFAULT_TREATED_TAG,
) -> dict[int, float]:
    return improvement_summary(grid.slice(baseline_tag), grid.slice(treated_tag))
