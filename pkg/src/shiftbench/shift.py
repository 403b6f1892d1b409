"""Label-shift scenario generation and seeded manifest resampling.

Five scenarios are modelled: an identity "none" shift and four single-class
boosts (rain, fog, snow, dust). A boost multiplies the boosted class's count
while the remaining class counts receive a random affine transform
``max(0, round(a*c + b))`` with ``a``, ``b`` drawn per class from configured
jitter ranges. Integer rounding is half-away-from-zero throughout so every
implementation language agrees.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .errors import CapacityError, DegenerateScenarioError, ValidationError
from .manifest import (
    SPLITS,
    DatasetManifest,
    LabelDistribution,
    Sample,
    canonical_class,
    make_sample,
)
from .rng import Pcg32

SHIFT_NAMES = ("none", "rain", "fog", "snow", "dust")
DEFAULT_BOOST_FACTOR = 2.0
DEFAULT_A_RANGE = (0.6, 1.0)
DEFAULT_B_RANGE = (0, 0)


def _round_half_away(x: float) -> int:
    """round(x) with halves away from zero (x >= 0 here)."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class ShiftScenario:
    """One target-distribution scenario; id 1 is the identity shift."""

    id: int
    name: str
    boosted_class: str | None = None
    boost_factor: float = DEFAULT_BOOST_FACTOR
    a_range: tuple[float, float] = DEFAULT_A_RANGE
    b_range: tuple[int, int] = DEFAULT_B_RANGE

    def __post_init__(self):
        if self.name not in SHIFT_NAMES:
            raise ValidationError(f"unknown shift name {self.name!r}")
        if not 1 <= self.id <= 5:
            raise ValidationError(f"shift id must be 1..5, got {self.id}")
        if (self.id == 1) != (self.name == "none"):
            raise ValidationError("shift id 1 and name 'none' imply each other")
        if self.name == "none":
            if self.boosted_class is not None:
                raise ValidationError("the 'none' shift cannot boost a class")
        else:
            boosted = self.boosted_class if self.boosted_class is not None else self.name
            object.__setattr__(self, "boosted_class", canonical_class(boosted))
        if self.boost_factor < 1:
            raise ValidationError("boost_factor must be >= 1")
        a_lo, a_hi = self.a_range
        if a_hi < a_lo:
            raise ValidationError("a_range must be (lo, hi) with lo <= hi")
        b_lo, b_hi = self.b_range
        if b_lo < 0 or b_hi < b_lo:
            raise ValidationError("b_range must be non-negative with lo <= hi")
        object.__setattr__(self, "a_range", (float(a_lo), float(a_hi)))
        object.__setattr__(self, "b_range", (int(b_lo), int(b_hi)))


def standard_scenarios(
    boost_factor: float = DEFAULT_BOOST_FACTOR,
    a_range: tuple[float, float] = DEFAULT_A_RANGE,
    b_range: tuple[int, int] = DEFAULT_B_RANGE,
) -> list[ShiftScenario]:
    """The five canonical scenarios, ids 1..5 = none, rain, fog, snow, dust."""
    return [
        ShiftScenario(
            id=i + 1,
            name=name,
            boost_factor=boost_factor,
            a_range=a_range,
            b_range=b_range,
        )
        for i, name in enumerate(SHIFT_NAMES)
    ]


def scenario_from_obj(obj: dict) -> ShiftScenario:
    """Build a scenario from its JSON object form:
    {"id": int, "name": str, "boost_factor": num,
     "a_range": [num, num], "b_range": [int, int]}."""
    try:
        return ShiftScenario(
            id=int(obj["id"]),
            name=str(obj["name"]).lower(),
            boosted_class=obj.get("boosted_class"),
            boost_factor=float(obj.get("boost_factor", DEFAULT_BOOST_FACTOR)),
            a_range=tuple(obj.get("a_range", DEFAULT_A_RANGE)),
            b_range=tuple(obj.get("b_range", DEFAULT_B_RANGE)),
        )
    except KeyError as exc:
        raise ValidationError(f"scenario object missing key {exc}") from exc


def load_scenario(path) -> ShiftScenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_obj(json.load(fh))


@dataclass(frozen=True)
class ResamplePlan:
    target: LabelDistribution
    with_replacement: bool
    seed: int


def make_shift(scenario: ShiftScenario, base: LabelDistribution, seed: int) -> LabelDistribution:
    """Apply a scenario to a base distribution, returning the target counts.

    The 'none' scenario returns the base unchanged. Otherwise the boosted
    class count becomes round(boost_factor * base) and every other class c,
    visited in canonical (sorted) class-name order, draws a ~ U[a_range] then
    b ~ U{b_range} from a PCG32 stream seeded with ``seed`` and becomes
    max(0, round(a*c + b)). If any jittered count reaches the boosted count,
    the non-boosted counts are rescaled by (boosted-1)/max_other and floored,
    which restores the boosted class as the strict argmax.
    """
    if base.total <= 0:
        raise ValidationError("base distribution must have positive total")
    if scenario.name == "none":
        return LabelDistribution(dict(base.counts))
    boosted = scenario.boosted_class
    if boosted not in base.counts:
        raise ValidationError(f"boosted class {boosted!r} not in distribution")
    if base.counts[boosted] == 0:
        raise DegenerateScenarioError(
            f"scenario {scenario.name!r} boosts class {boosted!r} with zero base count"
        )
    rng = Pcg32.from_seed(seed)
    counts = {boosted: _round_half_away(scenario.boost_factor * base.counts[boosted])}
    a_lo, a_hi = scenario.a_range
    b_lo, b_hi = scenario.b_range
    for name in base.class_list():
        if name == boosted:
            continue
        a = rng.uniform(a_lo, a_hi)
        b = rng.randint(b_lo, b_hi)
        counts[name] = max(0, _round_half_away(a * base.counts[name] + b))
    others = [c for c in counts if c != boosted]
    if others:
        max_other = max(counts[c] for c in others)
        if max_other >= counts[boosted]:
            scale = (counts[boosted] - 1) / max_other
            for c in others:
                counts[c] = int(math.floor(counts[c] * scale))
    return LabelDistribution(counts)


def base_sample_id(sample_id: str) -> str:
    """Strip the '#k' duplicate suffix applied by with-replacement resampling."""
    stem, sep, tail = sample_id.rpartition("#")
    if sep and tail.isdigit():
        return stem
    return sample_id


def resample(manifest: DatasetManifest, plan: ResamplePlan, split: str) -> DatasetManifest:
    """Resample one split of a manifest to match the plan's target counts.

    Samples outside ``split`` pass through untouched. Within the split, each
    class's picks are drawn uniformly via a seeded partial Fisher-Yates over
    the class's samples in manifest order; classes are processed in canonical
    class-name order on a single PCG32 stream seeded with ``plan.seed``. With
    replacement, the k-th occurrence of a sample (k >= 2) gets an id suffix
    "#k" so ids stay unique; selected samples are emitted in original manifest
    order with duplicates adjacent.
    """
    if split not in SPLITS:
        raise ValidationError(f"unknown split {split!r}")
    target = plan.target
    if set(target.counts) != set(manifest.classes):
        raise ValidationError(
            "target class set "
            f"{sorted(target.counts)} does not match manifest classes "
            f"{sorted(manifest.classes)}"
        )
    pools: dict[str, list[tuple[int, Sample]]] = {c: [] for c in manifest.classes}
    for idx, sample in enumerate(manifest.samples):
        if sample.split == split:
            pools[sample.class_name].append((idx, sample))

    rng = Pcg32.from_seed(plan.seed)
    picked: list[tuple[int, int, Sample]] = []  # (orig index, dup ordinal, sample)
    for name in sorted(target.counts):
        want = target.counts[name]
        pool = pools[name]
        if want == 0:
            continue
        if not plan.with_replacement:
            if want > len(pool):
                raise CapacityError(
                    f"class {name!r}: need {want} samples without replacement, "
                    f"only {len(pool)} available"
                )
            for i in rng.choose_indices(len(pool), want):
                idx, sample = pool[i]
                picked.append((idx, 0, sample))
        else:
            if not pool:
                raise CapacityError(f"class {name!r}: no samples available to draw from")
            times: dict[int, int] = {}
            for _ in range(want):
                i = rng.bounded(len(pool))
                times[i] = times.get(i, 0) + 1
                idx, sample = pool[i]
                k = times[i]
                if k == 1:
                    picked.append((idx, 0, sample))
                else:
                    picked.append((idx, k, make_sample(sample, id=f"{sample.id}#{k}")))

    picked.sort(key=lambda t: (t[0], t[1]))
    by_index = {}
    for idx, ordinal, sample in picked:
        by_index.setdefault(idx, []).append(sample)

    out: list[Sample] = []
    for idx, sample in enumerate(manifest.samples):
        if sample.split != split:
            out.append(sample)
        else:
            out.extend(by_index.get(idx, ()))
    return DatasetManifest(name=manifest.name, samples=tuple(out), classes=manifest.classes)


def shift_divergence(p: LabelDistribution, q: LabelDistribution) -> float:
    """Total-variation distance between the normalized distributions, in [0, 1]."""
    if set(p.counts) != set(q.counts):
        raise ValidationError("distributions have different class sets")
    if p.total <= 0 or q.total <= 0:
        raise ValidationError("both distributions must have positive totals")
    pn = p.normalized()
    qn = q.normalized()
    return 0.5 * sum(abs(pn[c] - qn[c]) for c in sorted(pn))


def scenario_by_key(key: str) -> ShiftScenario:
    """Resolve 'rain' / '3' style keys onto the standard scenario set."""
    scenarios = standard_scenarios()
    if key.isdigit():
        i = int(key)
        if not 1 <= i <= 5:
            raise ValidationError(f"scenario id must be 1..5, got {key}")
        return scenarios[i - 1]
    name = key.strip().lower()
    for sc in scenarios:
        if sc.name == name:
            return sc
    raise ValidationError(f"unknown scenario {key!r} (expected id 1..5 or one of {SHIFT_NAMES})")


def with_seed(plan: ResamplePlan, seed: int) -> ResamplePlan:
    return replace(plan, seed=seed)
