"""t-RAIN: similarity-mapped selection of synthetic samples for augmentation.

Per real anchor sample, the mapping oracle scans up to ``eta`` synthetic
candidates drawn at random, scores each against the anchor's class via cosine
similarity, and keeps the ``beta`` best. The outer loop repeats this for a
configurable number of anchor draws (default: once per real training sample)
and merges the admitted synthetic samples into the real training set,
relabelled to the anchor class.

Determinism: one SplitMix64 stream on the configured seed provides, in order,
the anchor-draw PCG32 seed and then one oracle seed per iteration, so an
identical (manifests, store, config, iterations) tuple reproduces the output
manifest bit for bit.
"""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass, field, replace

from .errors import EmptyOracleError, ValidationError
from .manifest import DatasetManifest, Sample, canonical_class, make_sample
from .rng import Pcg32, SplitMix64
from .simmap import EmbeddingStore, class_vector, cosine_similarity, label_vector

log = logging.getLogger(__name__)

DEFAULT_BETA = 210
DEFAULT_DIMS = 256


@dataclass(frozen=True)
class OracleConfig:
    """eta: synthetic candidates scanned per call; beta: top matches kept."""

    eta: int
    beta: int = DEFAULT_BETA
    dims: int = DEFAULT_DIMS
    seed: int = 0

    def __post_init__(self):
        if self.eta < 1:
            raise ValidationError("eta must be a positive integer")
        if self.beta < 1:
            raise ValidationError("beta must be a positive integer")
        if self.beta > self.eta:
            raise ValidationError(f"beta ({self.beta}) must not exceed eta ({self.eta})")
        if self.dims < 8:
            raise ValidationError("embedding dims must be >= 8")


@dataclass(frozen=True)
class ScoredSample:
    sample: Sample
    score: float

    def __post_init__(self):
        if not -1.0 <= self.score <= 1.0:
            raise ValidationError(f"score {self.score} outside [-1, 1]")


@dataclass(frozen=True)
class AugmentationSet:
    """Top-scored synthetic samples for one anchor class, best first."""

    source_class: str
    members: tuple[ScoredSample, ...]

    def ids(self) -> list[str]:
        return [m.sample.id for m in self.members]


@dataclass
class AugmentationReport:
    """Bookkeeping emitted alongside an augmented manifest."""

    iterations: int
    anchor_counts: dict[str, int] = field(default_factory=dict)
    added_per_class: dict[str, int] = field(default_factory=dict)
    score_quantiles: dict[str, dict[str, float]] = field(default_factory=dict)
    zero_augmentation_classes: list[str] = field(default_factory=list)
    conflicts: list[str] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "iterations": self.iterations,
            "anchor_counts": dict(sorted(self.anchor_counts.items())),
            "added_per_class": dict(sorted(self.added_per_class.items())),
            "score_quantiles": {c: self.score_quantiles[c] for c in sorted(self.score_quantiles)},
            "zero_augmentation_classes": sorted(self.zero_augmentation_classes),
            "conflicts": list(self.conflicts),
        }


@dataclass(frozen=True)
class AugmentationResult:
    manifest: DatasetManifest
    report: AugmentationReport


def oracle(
    anchor_class: str,
    synthetic: DatasetManifest,
    store: EmbeddingStore | None,
    cfg: OracleConfig,
) -> AugmentationSet:
    """Score a random sample of the synthetic pool against an anchor class and
    keep the top beta.

    Scans min(eta, #scorable) synthetic samples drawn uniformly without
    replacement (partial Fisher-Yates over the scorable samples in manifest
    order, PCG32 seeded with cfg.seed), sorts by (score desc, sample id asc)
    and truncates to beta. Unscorable samples are skipped; an entirely
    unscorable pool raises EmptyOracleError.
    """
    anchor = canonical_class(anchor_class)
    if store is not None and len(store) and store.dims != cfg.dims:
        raise ValidationError(
            f"embedding store dims ({store.dims}) disagree with cfg.dims ({cfg.dims})"
        )
    pool = [s for s in synthetic.samples if s.scorable()]
    if not pool:
        raise EmptyOracleError(
            f"synthetic manifest {synthetic.name!r} has no scorable samples"
        )
    anchor_vec = label_vector(anchor, store, cfg.dims)
    rng = Pcg32.from_seed(cfg.seed)
    scan = min(cfg.eta, len(pool))
    scored = []
    for i in rng.choose_indices(len(pool), scan):
        sample = pool[i]
        score = cosine_similarity(class_vector(sample, store, cfg.dims), anchor_vec)
        scored.append(ScoredSample(sample=sample, score=score))
    scored.sort(key=lambda s: (-s.score, s.sample.id))
    return AugmentationSet(source_class=anchor, members=tuple(scored[: cfg.beta]))


def t_rain(
    real: DatasetManifest,
    synthetic: DatasetManifest,
    store: EmbeddingStore | None,
    cfg: OracleConfig,
    iterations: int | None = None,
) -> AugmentationResult:
    """Outer augmentation loop: anchor draws, oracle calls, deduplicated merge.

    Each iteration draws one real training sample uniformly (with replacement
    across iterations), runs the oracle for its class, and admits the returned
    synthetic samples relabelled to that class. A synthetic sample id is
    admitted at most once; when oracles of different classes both select it,
    the first admission wins and a conflict is recorded. Ids colliding with a
    real sample id are skipped (also recorded). Admitted samples join the
    train split with source "synthetic". Real samples are never removed,
    reordered or relabelled.
    """
    train = real.split_samples("train")
    if not train:
        raise ValidationError(f"manifest {real.name!r} has an empty train split")
    if iterations is None:
        iterations = len(train)
    if iterations < 1:
        raise ValidationError("iterations must be a positive integer")

    seeds = SplitMix64(cfg.seed)
    anchor_rng = Pcg32.from_seed(seeds.next())

    report = AugmentationReport(iterations=iterations)
    real_ids = {s.id for s in real.samples}
    admitted: dict[str, str] = {}  # synthetic id -> admitting class
    added: list[Sample] = []
    scores_by_class: dict[str, list[float]] = {}

    for _ in range(iterations):
        oracle_seed = seeds.next()
        anchor = train[anchor_rng.bounded(len(train))]
        cls = anchor.class_name
        report.anchor_counts[cls] = report.anchor_counts.get(cls, 0) + 1
        try:
            selection = oracle(cls, synthetic, store, replace(cfg, seed=oracle_seed))
        except EmptyOracleError:
            continue
        for member in selection.members:
            sid = member.sample.id
            if sid in real_ids:
                report.conflicts.append(
                    f"synthetic id {sid!r} collides with a real sample id; skipped"
                )
                continue
            if sid in admitted:
                if admitted[sid] != cls:
                    report.conflicts.append(
                        f"synthetic id {sid!r} already admitted under class "
                        f"{admitted[sid]!r}; ignored for class {cls!r}"
                    )
                continue
            admitted[sid] = cls
            added.append(
                make_sample(member.sample, class_name=cls, split="train", source="synthetic")
            )
            report.added_per_class[cls] = report.added_per_class.get(cls, 0) + 1
            scores_by_class.setdefault(cls, []).append(member.score)

    for cls, scores in scores_by_class.items():
        report.score_quantiles[cls] = _quantiles(scores)
    report.zero_augmentation_classes = sorted(
        c for c in real.classes if report.added_per_class.get(c, 0) == 0
    )
    for conflict in report.conflicts:
        log.warning("%s", conflict)
    if report.zero_augmentation_classes:
        log.info("classes without augmentation: %s", report.zero_augmentation_classes)

    merged = DatasetManifest(
        name=f"{real.name}-augmented",
        samples=tuple(real.samples) + tuple(added),
        classes=real.classes | {s.class_name for s in added},
    )
    return AugmentationResult(manifest=merged, report=report)


def _quantiles(scores: list[float]) -> dict[str, float]:
    out = {"min": min(scores), "max": max(scores)}
    if len(scores) == 1:
        out.update(p25=scores[0], p50=scores[0], p75=scores[0])
    else:
        q1, q2, q3 = statistics.quantiles(scores, n=4, method="inclusive")
        out.update(p25=q1, p50=q2, p75=q3)
    return out
