"""Evaluation metrics: exact-match accuracy and the adjusted Rand index."""

from __future__ import annotations

from collections import Counter
from math import comb
from typing import Sequence

from .errors import ArgumentError, BoundsError


def accuracy(pred: Sequence, truth: Sequence) -> float:
    """Fraction of positions where ``pred`` equals ``truth``."""
    if len(pred) != len(truth):
        raise BoundsError(f"length mismatch: {len(pred)} vs {len(truth)}")
    if not pred:
        raise ArgumentError("accuracy of empty sequences is undefined")
    return sum(p == t for p, t in zip(pred, truth)) / len(pred)


def adjusted_rand_index(pred: Sequence, truth: Sequence) -> float:
    """Chance-corrected pair-counting agreement between two partitions.

    1 means identical partitions, 0 is the expected value for independent
    labelings; negative values are possible.
    """
    if len(pred) != len(truth):
        raise BoundsError(f"length mismatch: {len(pred)} vs {len(truth)}")
    n = len(pred)
    if n < 2:
        raise ArgumentError("adjusted Rand index needs at least 2 points")

    contingency = Counter(zip(pred, truth))
    pred_sizes = Counter(pred)
    truth_sizes = Counter(truth)

    index = sum(comb(c, 2) for c in contingency.values())
    sum_pred = sum(comb(c, 2) for c in pred_sizes.values())
    sum_truth = sum(comb(c, 2) for c in truth_sizes.values())
    total = comb(n, 2)
    expected = sum_pred * sum_truth / total
    max_index = 0.5 * (sum_pred + sum_truth)
    if max_index == expected:
        # both partitions trivial (all singletons or one cluster): identical
        return 1.0
    return (index - expected) / (max_index - expected)
