"""Random oversampling of tokenized sequences toward a majority-tied target."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from sklearn.base import BaseEstimator

from .seeding import derive_seed
from .wordpiece import TokenSeq


@dataclass(frozen=True)
class SamplingPlan:
    """Per-class addition counts toward ``target_count``.

    ``per_class_additions`` contains exactly the classes below the target,
    each mapped to its deficit.
    """

    target_count: int
    per_class_additions: dict[int, int]


def make_plan(class_counts: Mapping[int, int], r: float) -> SamplingPlan:
    """Build the oversampling plan: target = ceil(r * max count); every class
    below the target is mapped to target - count."""
    if not class_counts:
        raise ValueError("class_counts must be non-empty")
    if any(count < 1 for count in class_counts.values()):
        raise ValueError("all class counts must be at least 1")
    if not 0.0 < r <= 1.0:
        raise ValueError(f"sample rate r must be in (0, 1], got {r}")
    target = math.ceil(r * max(class_counts.values()))
    additions = {
        cls: target - count
        for cls, count in sorted(class_counts.items())
        if count < target
    }
    return SamplingPlan(target_count=target, per_class_additions=additions)


def apply_plan(train: Sequence[TokenSeq], plan: SamplingPlan, seed: int) -> list[TokenSeq]:
    """Append exact duplicates of uniformly-with-replacement chosen class
    members until each planned deficit is met.

    The original prefix is kept untouched and in order; duplicates take
    fresh uids derived from (source uid, duplicate index). Each class samples
    from a sub-seed of (seed, class id), so results are order-independent.
    """
    by_class: dict[int, list[TokenSeq]] = {}
    for seq in train:
        by_class.setdefault(seq.label_id, []).append(seq)
    out = list(train)
    for cls in sorted(plan.per_class_additions):
        members = by_class.get(cls)
        if not members:
            raise ValueError(f"plan covers class {cls} but no training sequence has that label")
        rng = random.Random(derive_seed(seed, "oversample", cls))
        for j in range(plan.per_class_additions[cls]):
            src = members[rng.randrange(len(members))]
            out.append(replace(src, uid=f"{src.uid}~dup{j}"))
    return out


def plan_report(plan: SamplingPlan, class_counts: Mapping[int, int], class_names=None) -> str:
    """Human-readable audit table: class, original count, target, additions."""
    lines = [f"target_count: {plan.target_count}", "class\toriginal\tfinal\tadditions"]
    for cls in sorted(class_counts):
        name = class_names[cls] if class_names is not None else str(cls)
        additions = plan.per_class_additions.get(cls, 0)
        lines.append(f"{name}\t{class_counts[cls]}\t{class_counts[cls] + additions}\t{additions}")
    return "\n".join(lines)


class RandomOversampler(BaseEstimator):
    """Eq-style oversampler over TokenSeq lists (fit_resample semantics).

    After resampling every class count equals max(original, ceil(rate * max
    original count)). The fitted ``plan_`` is kept for audit reporting.
    """

    def __init__(self, rate=0.1, seed=0):
        self.rate = rate
        self.seed = seed

    def fit_resample(self, seqs: Sequence[TokenSeq]) -> list[TokenSeq]:
        counts: dict[int, int] = {}
        for seq in seqs:
            counts[seq.label_id] = counts.get(seq.label_id, 0) + 1
        self.plan_ = make_plan(counts, self.rate)
        return apply_plan(seqs, self.plan_, self.seed)
