"""Dataset loading, cleaning, normalization, partitioning, and synthesis.

All operations are deterministic for a fixed seed and never mutate their
inputs; feature matrices returned here are marked read-only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

_SQUARE_RTOL = 1e-9
_SQUARE_ATOL = 1e-12


def _freeze(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """A binary-labelled feature table.

    features: (n_rows, n_cols) float64, read-only.
    labels: (n_rows,) int64 with values in {0, 1} (1 = positive class).
    column_names: one name per feature column, unique.
    provenance: "loaded" or "synthetic".
    seed: generator seed for synthetic data, else None.
    """

    features: np.ndarray
    labels: np.ndarray
    column_names: tuple[str, ...]
    provenance: str = "loaded"
    seed: int | None = None

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labs = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        n_rows, n_cols = feats.shape
        if n_rows < 2:
            raise DataError(f"need at least 2 rows, got {n_rows}")
        if n_cols < 1:
            raise DataError("need at least 1 feature column")
        if labs.shape != (n_rows,):
            raise DataError("labels length must match row count")
        bad = set(np.unique(labs)) - {0, 1}
        if bad:
            raise DataError(f"labels must be 0/1, found {sorted(bad)}")
        if len(self.column_names) != n_cols:
            raise DataError("column_names length must match column count")
        if len(set(self.column_names)) != n_cols:
            raise DataError("column names must be unique")
        object.__setattr__(self, "features", _freeze(feats))
        object.__setattr__(self, "labels", _freeze(labs))
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_cols(self) -> int:
        return self.features.shape[1]

    def take_rows(self, rows) -> "Dataset":
        """Return a new Dataset restricted to the given row indices."""
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            self.features[rows].copy(),
            self.labels[rows].copy(),
            self.column_names,
            self.provenance,
            self.seed,
        )

    def class_counts(self) -> tuple[int, int]:
        n1 = int(self.labels.sum())
        return self.n_rows - n1, n1


@dataclass(frozen=True)
class SplitIndices:
    """Disjoint row index sets covering a dataset."""

    train: np.ndarray
    validate: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        for name in ("train", "validate", "test"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            object.__setattr__(self, name, _freeze(arr))


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic two-class dataset.

    Informative columns are class-conditional Gaussians: class 0 draws from
    N(0, 1) and class 1 from N(class_separation, 1), so the mean gap equals
    class_separation standard deviations per column.  Noise columns are N(0, 1)
    regardless of class.  Each redundant pair appends a fresh noise column and
    its exact elementwise square.
    """

    n_rows: int
    n_cols: int
    n_informative: int
    class_separation: float = 3.0
    redundant_pairs: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.n_rows < 4:
            raise DataError("n_rows must be at least 4")
        if self.n_cols < 1:
            raise DataError("n_cols must be positive")
        if self.n_informative < 0:
            raise DataError("n_informative must be non-negative")
        if self.redundant_pairs < 0:
            raise DataError("redundant_pairs must be non-negative")
        if self.n_informative + 2 * self.redundant_pairs > self.n_cols:
            raise DataError(
                "n_informative + 2*redundant_pairs must not exceed n_cols"
            )
        if not self.class_separation > 0:
            raise DataError("class_separation must be positive")


@dataclass(frozen=True)
class MinMaxParams:
    """Per-column affine map learned by normalize_minmax."""

    mins: np.ndarray
    ranges: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mins", _freeze(np.asarray(self.mins, dtype=np.float64)))
        object.__setattr__(self, "ranges", _freeze(np.asarray(self.ranges, dtype=np.float64)))

    def apply(self, rows: np.ndarray) -> np.ndarray:
        """Map rows through the stored parameters (columns of width len(mins))."""
        rows = np.asarray(rows, dtype=np.float64)
        return (rows - self.mins) / self.ranges


@dataclass
class CleanReport:
    """What clean() removed and why."""

    rows_dropped: int = 0
    columns_dropped: list = field(default_factory=list)  # (name, reason) pairs

    def to_dict(self) -> dict:
        return {
            "rows_dropped": self.rows_dropped,
            "columns_dropped": [
                {"name": name, "reason": reason} for name, reason in self.columns_dropped
            ],
        }


def load_csv(path, label_column: str = "label", positive_label: str = "1") -> Dataset:
    """Load a delimited feature table with a header row.

    Args:
        path: CSV file path.
        label_column: header name of the class column.
        positive_label: token mapped to label 1; every other token maps to 0.
            At most two distinct tokens may appear, and with two the positive
            token must be one of them.

    Returns:
        Dataset with float features; empty cells become NaN (dropped later by
        clean()).

    Raises:
        DataError: on unreadable files, malformed headers, unparseable cells
            (reported with 1-based row and column), or bad label tokens.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"{path}: duplicate header names {dupes}")
    if label_column not in header:
        raise DataError(f"{path}: label column {label_column!r} not in header")
    label_idx = header.index(label_column)
    names = tuple(h for i, h in enumerate(header) if i != label_idx)

    feats, tokens = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
        vals = []
        for c, cell in enumerate(row):
            if c == label_idx:
                tokens.append(cell.strip())
                continue
            cell = cell.strip()
            if cell == "":
                vals.append(math.nan)
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise DataError(
                    f"{path}: unparseable cell {cell!r} at row {r}, column {c + 1}"
                ) from None
        feats.append(vals)
    if not feats:
        raise DataError(f"{path}: no data rows")

    distinct = sorted(set(tokens))
    if len(distinct) > 2:
        raise DataError(f"{path}: label column has {len(distinct)} distinct tokens, expected at most 2")
    if len(distinct) == 2 and positive_label not in distinct:
        raise DataError(
            f"{path}: positive label {positive_label!r} not among tokens {distinct}"
        )
    labels = np.array([1 if t == positive_label else 0 for t in tokens], dtype=np.int64)
    return Dataset(np.array(feats, dtype=np.float64), labels, names, provenance="loaded")


def clean(d: Dataset) -> tuple[Dataset, CleanReport]:
    """Drop unusable rows and redundant columns.

    Removes, in order: rows containing missing or non-finite values;
    zero-variance columns; exact duplicate columns (keeping the lower index);
    any column equal to the elementwise square of another surviving candidate
    (relative tolerance 1e-9).  Idempotent.

    Returns:
        (cleaned dataset, report of removals)

    Raises:
        DataError: if fewer than 2 rows or no columns survive.
    """
    report = CleanReport()
    finite = np.isfinite(d.features).all(axis=1)
    report.rows_dropped = int((~finite).sum())
    feats = d.features[finite]
    labels = d.labels[finite]
    if feats.shape[0] < 2:
        raise DataError("fewer than 2 rows remain after dropping incomplete rows")

    keep = np.ones(d.n_cols, dtype=bool)
    # zero variance
    for j in range(d.n_cols):
        col = feats[:, j]
        if np.all(col == col[0]):
            keep[j] = False
            report.columns_dropped.append((d.column_names[j], "zero_variance"))
    # exact duplicates, first occurrence wins
    alive = [j for j in range(d.n_cols) if keep[j]]
    for pos, j in enumerate(alive):
        if not keep[j]:
            continue
        for i in alive[:pos]:
            if keep[i] and np.array_equal(feats[:, j], feats[:, i]):
                keep[j] = False
                report.columns_dropped.append(
                    (d.column_names[j], f"duplicate_of:{d.column_names[i]}")
                )
                break
    # squared copies of another column
    alive = [j for j in range(d.n_cols) if keep[j]]
    squares = {i: feats[:, i] ** 2 for i in alive}
    for j in alive:
        col = feats[:, j]
        for i in alive:
            if i == j:
                continue
            if np.allclose(col, squares[i], rtol=_SQUARE_RTOL, atol=_SQUARE_ATOL):
                keep[j] = False
                report.columns_dropped.append(
                    (d.column_names[j], f"squared_copy_of:{d.column_names[i]}")
                )
                break

    if not keep.any():
        raise DataError("no feature columns survive cleaning")
    names = tuple(n for n, k in zip(d.column_names, keep) if k)
    out = Dataset(feats[:, keep].copy(), labels.copy(), names, d.provenance, d.seed)
    return out, report


def normalize_minmax(d: Dataset) -> tuple[Dataset, MinMaxParams]:
    """Rescale every column onto [0, 1].

    The affine parameters are returned so held-out rows can be mapped with
    the same transform.

    Raises:
        DataError: if any column is constant (run clean() first).
    """
    mins = d.features.min(axis=0)
    maxs = d.features.max(axis=0)
    ranges = maxs - mins
    flat = np.nonzero(ranges == 0)[0]
    if flat.size:
        raise DataError(
            f"constant column {d.column_names[flat[0]]!r}; run clean() before normalizing"
        )
    params = MinMaxParams(mins, ranges)
    out = Dataset(params.apply(d.features), d.labels.copy(), d.column_names, d.provenance, d.seed)
    return out, params


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _allocate(quotas, total, limits):
    """Integer allocation by largest remainder, respecting per-bin limits."""
    base = [min(int(math.floor(q)), lim) for q, lim in zip(quotas, limits)]
    alloc = list(base)
    leftover = total - sum(alloc)
    # rank bins by fractional remainder, ties to the lower index
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - math.floor(quotas[i])), i))
    pos = 0
    while leftover > 0 and pos < 2 * len(quotas):
        i = order[pos % len(quotas)]
        if alloc[i] < limits[i]:
            alloc[i] += 1
            leftover -= 1
        pos += 1
    return alloc


def split(d: Dataset, train_frac: float = 0.8, validate_frac: float = 0.1,
          seed: int = 0) -> SplitIndices:
    """Stratified train/validate/test partition.

    Partition sizes are the half-up rounded fractions of the row count; rows
    are dealt per class so each partition keeps class proportions within one
    sample per class.  Deterministic for a fixed seed.

    Raises:
        DataError: on invalid fractions or a class with fewer than 3 members.
    """
    if not (0 < train_frac < 1 and 0 < validate_frac < 1):
        raise DataError("fractions must lie strictly between 0 and 1")
    if train_frac + validate_frac >= 1:
        raise DataError("train_frac + validate_frac must be below 1")

    classes = [np.nonzero(d.labels == c)[0] for c in (0, 1)]
    for c, idx in enumerate(classes):
        if idx.size < 3:
            raise DataError(f"class {c} has {idx.size} rows; need at least 3 to stratify")

    n = d.n_rows
    n_train = _round_half_up(train_frac * n)
    n_val = _round_half_up(validate_frac * n)
    if n_train + n_val >= n:
        raise DataError("fractions leave no test rows")

    sizes = [idx.size for idx in classes]
    tr_alloc = _allocate([train_frac * s for s in sizes], n_train, sizes)
    rem = [s - t for s, t in zip(sizes, tr_alloc)]
    va_alloc = _allocate([validate_frac * s for s in sizes], n_val, rem)

    rng = np.random.default_rng(seed)
    parts = {"train": [], "validate": [], "test": []}
    for idx, tr_c, va_c in zip(classes, tr_alloc, va_alloc):
        shuffled = rng.permutation(idx)
        parts["train"].append(shuffled[:tr_c])
        parts["validate"].append(shuffled[tr_c:tr_c + va_c])
        parts["test"].append(shuffled[tr_c + va_c:])
    return SplitIndices(
        np.sort(np.concatenate(parts["train"])),
        np.sort(np.concatenate(parts["validate"])),
        np.sort(np.concatenate(parts["test"])),
    )


def kfold_indices(d: Dataset, k: int, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified k-fold partition as (train_indices, test_indices) pairs.

    Each class is shuffled once and dealt round-robin, so fold sizes differ by
    at most one row per class.

    Raises:
        DataError: if k < 2 or any class has fewer than k members.
    """
    if k < 2:
        raise DataError("k must be at least 2")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    for c in (0, 1):
        idx = np.nonzero(d.labels == c)[0]
        if idx.size < k:
            raise DataError(f"class {c} has {idx.size} rows; need at least {k} for {k}-fold")
        shuffled = rng.permutation(idx)
        for f in range(k):
            folds[f].append(shuffled[f::k])
    out = []
    all_rows = np.arange(d.n_rows)
    for f in range(k):
        test = np.sort(np.concatenate(folds[f]))
        train = np.setdiff1d(all_rows, test, assume_unique=True)
        out.append((train, test))
    return out


def synthesize(spec: SynthSpec) -> tuple[Dataset, np.ndarray]:
    """Generate a labelled dataset with known informative columns.

    Returns:
        (dataset, true_mask) where true_mask is a 0/1 vector flagging the
        informative columns.
    """
    rng = np.random.default_rng(spec.seed)
    n1 = spec.n_rows // 2
    labels = np.zeros(spec.n_rows, dtype=np.int64)
    labels[:n1] = 1
    labels = labels[rng.permutation(spec.n_rows)]

    n_noise = spec.n_cols - spec.n_informative - 2 * spec.redundant_pairs
    cols, names = [], []
    width = max(2, len(str(spec.n_cols)))
    for i in range(spec.n_informative):
        base = rng.normal(0.0, 1.0, spec.n_rows)
        cols.append(base + spec.class_separation * labels)
        names.append(f"sig_{i:0{width}d}")
    for i in range(n_noise):
        cols.append(rng.normal(0.0, 1.0, spec.n_rows))
        names.append(f"noise_{i:0{width}d}")
    for i in range(spec.redundant_pairs):
        base = rng.normal(0.0, 1.0, spec.n_rows)
        cols.append(base)
        names.append(f"base_{i:0{width}d}")
        cols.append(base ** 2)
        names.append(f"base_{i:0{width}d}_sq")

    feats = np.column_stack(cols) if cols else np.empty((spec.n_rows, 0))
    true_mask = np.zeros(spec.n_cols, dtype=np.uint8)
    true_mask[: spec.n_informative] = 1
    ds = Dataset(feats, labels, tuple(names), provenance="synthetic", seed=spec.seed)
    return ds, true_mask


def write_csv(d: Dataset, path, label_column: str = "label") -> None:
    """Write a dataset back to CSV with labels as 1/0 tokens."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.column_names) + [label_column])
        for row, lab in zip(d.features, d.labels):
            writer.writerow([repr(float(v)) for v in row] + [str(int(lab))])
