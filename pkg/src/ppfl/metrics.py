"""One-vs-rest confusion counts and accuracy / precision / recall / F1.

Per-class ratios whose denominator is zero are defined as 0 and reported
through a boolean flag array rather than surfacing as NaN.
"""

from __future__ import annotations

import math

from dataclasses import dataclass

import numpy as np

from .errors import InputError

AVERAGING = ("macro", "weighted", "positive")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray
    total: int

    @classmethod
    def from_binary(cls, tp, tn, fp, fn):
        """Two-class counts from the positive class (index 1) view."""
        total = tp + tn + fp + fn
        return cls(
            tp=np.array([tn, tp]),
            fp=np.array([fn, fp]),
            fn=np.array([fp, fn]),
            tn=np.array([tp, tn]),
            total=int(total),
        )

    @property
    def num_classes(self):
        return int(self.tp.size)

    @property
    def support(self):
        return self.tp + self.fn


def confusion(predictions, truths, num_classes):
    predictions = np.asarray(predictions, dtype=np.int64).ravel()
    truths = np.asarray(truths, dtype=np.int64).ravel()
    if predictions.size != truths.size:
        raise InputError(f"{predictions.size} predictions vs {truths.size} truths")
    if predictions.size == 0:
        raise InputError("need at least one prediction")
    for name, arr in (("prediction", predictions), ("truth", truths)):
        if arr.min() < 0 or arr.max() >= num_classes:
            raise InputError(f"{name} label outside [0, {num_classes})")
    total = int(predictions.size)
    tp = np.bincount(truths[predictions == truths], minlength=num_classes)
    predicted = np.bincount(predictions, minlength=num_classes)
    actual = np.bincount(truths, minlength=num_classes)
    fp = predicted - tp
    fn = actual - tp
    tn = total - tp - fp - fn
    return ConfusionCounts(tp, fp, fn, tn, total)


def _require_total(counts):
    if counts.total <= 0:
        raise InputError("confusion counts are empty")


def _ratio(num, den):
    num = num.astype(np.float64)
    den = den.astype(np.float64)
    zero = den == 0
    out = np.divide(num, den, out=np.zeros_like(num), where=~zero)
    return out, zero


def per_class_precision(counts):
    """``(values, zero_denominator_flags)`` per class."""
    _require_total(counts)
    return _ratio(counts.tp, counts.tp + counts.fp)


def per_class_recall(counts):
    _require_total(counts)
    return _ratio(counts.tp, counts.tp + counts.fn)


def per_class_f1(counts):
    p, _ = per_class_precision(counts)
    r, _ = per_class_recall(counts)
    return _ratio(2.0 * p * r, p + r)


def _average(values, counts, averaging, positive_class):
    if averaging == "macro":
        # fsum is correctly rounded, so the result does not depend on class order
        return math.fsum(values.tolist()) / values.size
    if averaging == "weighted":
        support = counts.support.astype(np.float64)
        return math.fsum((values * support).tolist()) / math.fsum(support.tolist())
    if averaging == "positive":
        return float(values[positive_class])
    raise InputError(f"averaging must be one of {AVERAGING}, got {averaging!r}")


def accuracy(counts):
    _require_total(counts)
    return float(counts.tp.sum() / counts.total)


def precision(counts, averaging="macro", positive_class=1):
    values, _ = per_class_precision(counts)
    return _average(values, counts, averaging, positive_class)


def recall(counts, averaging="macro", positive_class=1):
    values, _ = per_class_recall(counts)
    return _average(values, counts, averaging, positive_class)


def f1(counts, averaging="macro", positive_class=1):
    values, _ = per_class_f1(counts)
    return _average(values, counts, averaging, positive_class)


def summarize(predictions, truths, num_classes, averaging="macro"):
    """All four scores as a dict, the form the harness records."""
    counts = confusion(predictions, truths, num_classes)
    return {
        "accuracy": accuracy(counts),
        "precision": precision(counts, averaging),
        "recall": recall(counts, averaging),
        "f1": f1(counts, averaging),
    }
