"""Confusion-matrix metrics, wrapper fitness, and cross-validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, kfold_indices
from .errors import DataError


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts with the positive class (label 1) as 'autism'."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.total == 0:
            raise ValueError("confusion matrix is empty")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    """Per-class classification metrics.

    Any metric whose denominator was zero is reported as 0.0 and listed in
    `flags`.
    """

    accuracy: float
    recall_autism: float
    recall_typical: float
    precision_autism: float
    precision_typical: float
    f1_autism: float
    f1_typical: float
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "recall_autism": self.recall_autism,
            "recall_typical": self.recall_typical,
            "precision_autism": self.precision_autism,
            "precision_typical": self.precision_typical,
            "f1_autism": self.f1_autism,
            "f1_typical": self.f1_typical,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class FitnessValue:
    """Weighted blend of accuracy and feature reduction."""

    value: float
    accuracy: float
    reduction: float
    n_selected: int


@dataclass(frozen=True)
class CVResult:
    """Per-fold accuracies with their mean and population std."""

    accuracies: tuple[float, ...]
    mean: float
    std: float


def _ratio(num, den, name, flags):
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy plus per-class recall, precision, and F1.

    The typical-class metrics are the autism-class formulas with the positive
    class swapped.  F1 is the harmonic mean of precision and recall; 0/0
    degenerate cases score 0 and are flagged.
    """
    flags: list[str] = []
    acc = (cm.tp + cm.tn) / cm.total
    rec_a = _ratio(cm.tp, cm.tp + cm.fn, "recall_autism", flags)
    rec_t = _ratio(cm.tn, cm.tn + cm.fp, "recall_typical", flags)
    pre_a = _ratio(cm.tp, cm.tp + cm.fp, "precision_autism", flags)
    pre_t = _ratio(cm.tn, cm.tn + cm.fn, "precision_typical", flags)
    f1_a = _ratio(2 * pre_a * rec_a, pre_a + rec_a, "f1_autism", flags)
    f1_t = _ratio(2 * pre_t * rec_t, pre_t + rec_t, "f1_typical", flags)
    return MetricsReport(acc, rec_a, rec_t, pre_a, pre_t, f1_a, f1_t, tuple(flags))


def feature_reduction(n_selected: int, total: int) -> float:
    """Fraction of features discarded."""
    if total < 1:
        raise ValueError("total must be positive")
    if not 0 <= n_selected <= total:
        raise ValueError("n_selected must lie in [0, total]")
    return (total - n_selected) / total


def format_percent(fraction: float, decimals: int = 2) -> str:
    """Render a fraction as a percentage, truncating extra digits.

    Truncation (not rounding) matches the reference tables this package
    reproduces: 0.69817 renders as '69.81%'.
    """
    scaled = math.floor(fraction * 100 * 10 ** decimals) / 10 ** decimals
    return f"{scaled:.{decimals}f}%"


def fitness(cm: ConfusionMatrix, mask, total_features: int, weight: float = 0.8) -> FitnessValue:
    """Wrapper objective: weight*accuracy + (1-weight)*reduction.

    Raises:
        ValueError: if weight is outside [0, 1] or the mask is empty.
    """
    if not 0 <= weight <= 1:
        raise ValueError("weight must lie in [0, 1]")
    mask = np.asarray(mask, dtype=np.uint8)
    n_selected = int(mask.sum())
    if n_selected == 0:
        raise ValueError("mask selects no features")
    acc = (cm.tp + cm.tn) / cm.total
    red = feature_reduction(n_selected, total_features)
    return FitnessValue(weight * acc + (1 - weight) * red, acc, red, n_selected)


def cross_validate(spec, d: Dataset, mask, k: int = 10, seed: int = 0) -> CVResult:
    """Stratified k-fold accuracy for one classifier and feature mask.

    Folds are rebuilt from the seed; each fold trains from scratch, so scaling
    parameters are refit per fold.

    Raises:
        DataError: if a fold's training rows hold a single class and the
            classifier cannot tolerate it (RF, SVM).
    """
    from .classifiers import evaluate_masked

    folds = kfold_indices(d, k, seed)
    accs = []
    for f, (train_rows, test_rows) in enumerate(folds):
        if spec.kind in ("rf", "svm") and len(np.unique(d.labels[train_rows])) < 2:
            raise DataError(f"fold {f} training rows contain a single class")
        cm = evaluate_masked(spec, d, train_rows, test_rows, mask)
        accs.append((cm.tp + cm.tn) / cm.total)
    arr = np.asarray(accs, dtype=np.float64)
    return CVResult(tuple(float(a) for a in arr), float(arr.mean()), float(arr.std()))
