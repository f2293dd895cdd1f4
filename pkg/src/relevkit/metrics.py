"""Ranking metrics over graded relevance: pairwise multiclass AUC and net GSB."""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

from .corpus import RelevanceLabel


@dataclass(frozen=True)
class ScoredPrediction:
    """A reference label with the model's continuous score for the same pair."""

    reference: RelevanceLabel
    predicted_score: float

    def __post_init__(self) -> None:
        if not isinstance(self.predicted_score, (int, float)) or isinstance(self.predicted_score, bool):
            raise ValueError("predicted_score must be a number")
        if not math.isfinite(self.predicted_score):
            raise ValueError("predicted_score must be finite")


@dataclass(frozen=True)
class GsbCounts:
    """Good/Same/Bad judgment counts from a side-by-side comparison."""

    good: int
    same: int
    bad: int

    def __post_init__(self) -> None:
        for name in ("good", "same", "bad"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer")

    @property
    def total(self) -> int:
        return self.good + self.same + self.bad


def indicator(a: float, b: float) -> int:
    """1 when a is strictly greater than b, else 0. Ties score 0."""
    return 1 if a > b else 0


def _require_multiple_classes(predictions: list[ScoredPrediction]) -> None:
    if len({p.reference for p in predictions}) < 2:
        raise ValueError("AUC undefined: single reference class")


def multiclass_auc_reference(predictions: Iterable[ScoredPrediction]) -> float:
    """Pairwise AUC by brute force over all ordered pairs.

    Quadratic in the number of predictions; kept as the oracle the fast
    implementation is checked against.
    """
    preds = list(predictions)
    _require_multiple_classes(preds)
    numerator = 0
    denominator = 0
    for a in preds:
        for b in preds:
            if indicator(a.reference.score, b.reference.score):
                denominator += 1
                numerator += indicator(a.predicted_score, b.predicted_score)
    return numerator / denominator


def multiclass_auc(predictions: Iterable[ScoredPrediction]) -> float:
    """Fraction of class-ordered pairs whose scores are ordered the same way.

    Considers every ordered pair whose reference labels differ in gain
    and counts it correct only when the predicted scores are strictly
    ordered alike; tied scores count as incorrect. Runs in O(n log n) by
    sorting each class's scores once, and returns exactly the same value
    as multiclass_auc_reference.

    Raises ValueError when fewer than two reference classes are present,
    since no ordered pair exists to score.
    """
    preds = list(predictions)
    _require_multiple_classes(preds)
    by_class: dict[RelevanceLabel, list[float]] = defaultdict(list)
    for p in preds:
        by_class[p.reference].append(p.predicted_score)
    for scores in by_class.values():
        scores.sort()
    classes = sorted(by_class, key=lambda label: label.score)
    numerator = 0
    denominator = 0
    for i, low in enumerate(classes):
        low_scores = by_class[low]
        for high in classes[i + 1:]:
            high_scores = by_class[high]
            denominator += len(high_scores) * len(low_scores)
            for score in high_scores:
                numerator += bisect_left(low_scores, score)
    return numerator / denominator


def delta_gsb(counts: GsbCounts) -> float:
    """Net preference rate, (good - bad) / total, in [-1.0, 1.0]."""
    if counts.total == 0:
        raise ValueError("no judgments")
    return (counts.good - counts.bad) / counts.total
