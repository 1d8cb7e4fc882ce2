"""Correlation and Relief feature ranking.

Scores features against the binary class labels, orders them by absolute
score (ties broken toward the lower column index), and derives the top-k
"leading" mask that seeds the wrapper search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DataError, UndefinedStatisticError

METHODS = ("pearson", "spearman", "relief")


@dataclass(frozen=True)
class RankedFeatures:
    """Scores plus the descending-score ordering of feature indices."""

    method: str
    scores: np.ndarray   # score per column, same order as the dataset
    order: np.ndarray    # column indices, best first

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        order = np.asarray(self.order, dtype=np.int64)
        if sorted(order.tolist()) != list(range(scores.size)):
            raise ValueError("order must be a permutation of the column indices")
        scores.setflags(write=False)
        order.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "order", order)


def pearson(x, y) -> float:
    """Pearson correlation coefficient using population (1/n) moments.

    Raises:
        UndefinedStatisticError: if either input is constant.
        ValueError: on length mismatch or fewer than 2 samples.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-D vectors of equal length")
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(np.mean(dx * dx)))
    sy = math.sqrt(float(np.mean(dy * dy)))
    if sx == 0 or sy == 0:
        raise UndefinedStatisticError("correlation undefined for constant input")
    return float(np.mean(dx * dy)) / (sx * sy)


def _average_ranks(v: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the average of their positions."""
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.float64)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson applied to average ranks."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-D vectors of equal length")
    return pearson(_average_ranks(x), _average_ranks(y))


def relief_weights(d: Dataset, seed: int | None = None) -> np.ndarray:
    """Relief feature weights with every row used once.

    For each row the nearest same-class neighbour (nearHit) and nearest
    opposite-class neighbour (nearMiss) are found by Euclidean distance over
    all features, ties resolved toward the lower row index.  Each weight
    accumulates -(x - nearHit)^2 + (x - nearMiss)^2 per feature and the total
    is divided by the number of rows.  Because all rows are visited, the
    result does not depend on `seed`; the parameter is kept for signature
    stability.

    Expects features already scaled to [0, 1].

    Raises:
        DataError: if either class is absent or there are fewer than 4 rows.
    """
    X = d.features
    y = d.labels
    n = d.n_rows
    if n < 4:
        raise DataError("relief needs at least 4 rows")
    if len(np.unique(y)) < 2:
        raise DataError("relief needs both classes present")

    sq = (X ** 2).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, np.inf)

    same = y[:, None] == y[None, :]
    hit_d = np.where(same, d2, np.inf)
    miss_d = np.where(~same, d2, np.inf)
    # np.argmin returns the first minimum, i.e. the lowest row index on ties
    hits = np.argmin(hit_d, axis=1)
    misses = np.argmin(miss_d, axis=1)

    w = ((X - X[misses]) ** 2).sum(axis=0) - ((X - X[hits]) ** 2).sum(axis=0)
    return w / n


def rank_features(d: Dataset, method: str, seed: int | None = None) -> RankedFeatures:
    """Score every column against the labels and order them best-first.

    Correlation methods use the absolute coefficient; a column whose
    coefficient is undefined (constant input) scores 0.  Relief uses the
    averaged weights directly.  Ties order toward the lower column index.

    Raises:
        DataError: on unknown method, or (relief) single-class data.
    """
    if method not in METHODS:
        raise DataError(f"unknown ranking method {method!r}; choose from {METHODS}")
    if method == "relief":
        scores = relief_weights(d, seed)
    else:
        coef = pearson if method == "pearson" else spearman
        y = d.labels.astype(np.float64)
        scores = np.empty(d.n_cols, dtype=np.float64)
        for j in range(d.n_cols):
            try:
                scores[j] = abs(coef(d.features[:, j], y))
            except UndefinedStatisticError:
                scores[j] = 0.0
    order = np.lexsort((np.arange(d.n_cols), -scores))
    return RankedFeatures(method, scores, order)


def leading_mask(r: RankedFeatures, k: int | None = None) -> np.ndarray:
    """0/1 vector selecting the k best-ranked features (default: top half).

    Raises:
        ValueError: if k is outside [1, n_cols].
    """
    n = r.scores.size
    if k is None:
        k = math.ceil(n / 2)
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    mask = np.zeros(n, dtype=np.uint8)
    mask[r.order[:k]] = 1
    return mask
