"""From-scratch KNN, random forest, and linear SVM over masked features.

Models are trained on a row subset and a feature mask; prediction always
takes full-width rows and applies the stored mask internally, so a model can
never consume a column it was not trained on.  All randomness flows through
seeds carried by ClassifierSpec, making training fully reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DataError

KINDS = ("knn", "rf", "svm")


@dataclass(frozen=True)
class ClassifierSpec:
    """Hyperparameters for one classifier instance."""

    kind: str
    knn_k: int = 5
    rf_trees: int = 100
    rf_max_depth: int | None = None
    svm_epochs: int = 200
    svm_learning_rate: float = 0.01
    svm_regularization: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}; choose from {KINDS}")
        if self.knn_k < 1 or self.knn_k % 2 == 0:
            raise ValueError("knn_k must be odd and at least 1")
        if self.rf_trees < 1:
            raise ValueError("rf_trees must be positive")
        if self.rf_max_depth is not None and self.rf_max_depth < 1:
            raise ValueError("rf_max_depth must be positive or None")
        if self.svm_epochs < 1:
            raise ValueError("svm_epochs must be positive")
        if self.svm_learning_rate <= 0:
            raise ValueError("svm_learning_rate must be positive")
        if self.svm_regularization < 0:
            raise ValueError("svm_regularization must be non-negative")


def _validate_mask(mask, n_cols) -> np.ndarray:
    mask = np.asarray(mask, dtype=np.uint8)
    if mask.shape != (n_cols,) or not set(np.unique(mask)) <= {0, 1}:
        raise ValueError("mask must be a 0/1 vector matching the column count")
    if mask.sum() == 0:
        raise ValueError("mask selects no features")
    return mask


@dataclass
class TrainedModel:
    """A fitted classifier bound to its feature mask."""

    kind: str
    mask: np.ndarray
    feature_idx: np.ndarray
    params: dict
    state: dict = field(default_factory=dict)

    def predict(self, row) -> int:
        """Classify one full-width feature row."""
        row = np.asarray(row, dtype=np.float64)
        if row.shape != (self.mask.size,):
            raise ValueError(f"row must have {self.mask.size} features")
        return int(self.predict_rows(row[None, :])[0])

    def predict_rows(self, rows) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        X = rows[:, self.feature_idx]
        if self.kind == "knn":
            return _knn_predict(self, X)
        if self.kind == "rf":
            return _rf_predict(self, X)
        return _svm_predict(self, X)

    def to_dict(self) -> dict:
        """JSON-ready form: trees as flat node arrays, SVM as weight lists."""
        out = {
            "kind": self.kind,
            "mask": [int(b) for b in self.mask],
            "params": dict(self.params),
        }
        if self.kind == "knn":
            out["train_features"] = self.state["X"].tolist()
            out["train_labels"] = self.state["y"].tolist()
            out["mins"] = self.state["mins"].tolist()
            out["ranges"] = self.state["ranges"].tolist()
        elif self.kind == "rf":
            out["trees"] = [
                {key: tree[key].tolist() for key in ("feature", "threshold", "left", "right", "leaf")}
                for tree in self.state["trees"]
            ]
        else:
            out["weights"] = self.state["w"].tolist()
            out["bias"] = float(self.state["b"])
            out["means"] = self.state["mu"].tolist()
            out["stds"] = self.state["sigma"].tolist()
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "TrainedModel":
        mask = np.asarray(payload["mask"], dtype=np.uint8)
        model = cls(payload["kind"], mask, np.nonzero(mask)[0], dict(payload["params"]))
        if model.kind == "knn":
            model.state = {
                "X": np.asarray(payload["train_features"], dtype=np.float64),
                "y": np.asarray(payload["train_labels"], dtype=np.int64),
                "mins": np.asarray(payload["mins"], dtype=np.float64),
                "ranges": np.asarray(payload["ranges"], dtype=np.float64),
            }
        elif model.kind == "rf":
            model.state = {
                "trees": [
                    {
                        "feature": np.asarray(t["feature"], dtype=np.int64),
                        "threshold": np.asarray(t["threshold"], dtype=np.float64),
                        "left": np.asarray(t["left"], dtype=np.int64),
                        "right": np.asarray(t["right"], dtype=np.int64),
                        "leaf": np.asarray(t["leaf"], dtype=np.int64),
                    }
                    for t in payload["trees"]
                ]
            }
        else:
            model.state = {
                "w": np.asarray(payload["weights"], dtype=np.float64),
                "b": float(payload["bias"]),
                "mu": np.asarray(payload["means"], dtype=np.float64),
                "sigma": np.asarray(payload["stds"], dtype=np.float64),
            }
        return model


# ---------------------------------------------------------------- KNN

def _knn_train(spec, X, y):
    mins = X.min(axis=0)
    ranges = X.max(axis=0) - mins
    ranges = np.where(ranges == 0, 1.0, ranges)
    return {"X": (X - mins) / ranges, "y": y.copy(), "mins": mins, "ranges": ranges}


def _knn_predict(model, X):
    st = model.state
    k = model.params["knn_k"]
    Xq = (X - st["mins"]) / st["ranges"]
    train = st["X"]
    d2 = (Xq ** 2).sum(axis=1)[:, None] + (train ** 2).sum(axis=1)[None, :] - 2.0 * (Xq @ train.T)
    # stable argsort keeps the lower training-row index first on distance ties
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    votes = st["y"][nearest].sum(axis=1)
    # majority vote; an even split falls back to label 0
    return (votes * 2 > k).astype(np.int64)


# ---------------------------------------------------------------- random forest

def _gini_best_split(X, y, candidates):
    """Best (weighted_gini, feature_pos, threshold) over candidate columns.

    Candidates are scanned in the order drawn; only a strictly better
    impurity replaces the incumbent, so ties resolve to the earlier draw and,
    within a column, to the lowest threshold.
    """
    n = y.size
    n1_total = int(y.sum())
    best = None
    for f in candidates:
        order = np.argsort(X[:, f], kind="stable")
        vs = X[order, f]
        ys = y[order]
        cut_ok = vs[1:] > vs[:-1]
        if not cut_ok.any():
            continue
        left_n = np.arange(1, n, dtype=np.float64)
        left1 = np.cumsum(ys)[:-1].astype(np.float64)
        right_n = n - left_n
        right1 = n1_total - left1
        gini_l = 1.0 - (left1 / left_n) ** 2 - ((left_n - left1) / left_n) ** 2
        gini_r = 1.0 - (right1 / right_n) ** 2 - ((right_n - right1) / right_n) ** 2
        weighted = (left_n * gini_l + right_n * gini_r) / n
        weighted[~cut_ok] = np.inf
        i = int(np.argmin(weighted))
        if best is None or weighted[i] < best[0]:
            best = (float(weighted[i]), int(f), float((vs[i] + vs[i + 1]) / 2.0))
    return best


def _grow_tree(X, y, rng, max_depth, n_candidates, feature_idx):
    """CART tree as parallel node arrays; leaf == -1 marks internal nodes."""
    feature, threshold, left, right, leaf = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf.append(-1)
        return len(leaf) - 1

    stack = [(new_node(), np.arange(y.size), 0)]
    while stack:
        node, rows, depth = stack.pop()
        ys = y[rows]
        n1 = int(ys.sum())
        if n1 == 0 or n1 == ys.size or (max_depth is not None and depth >= max_depth):
            leaf[node] = 1 if n1 * 2 > ys.size else 0
            continue
        cand = rng.choice(X.shape[1], size=n_candidates, replace=False)
        split_at = _gini_best_split(X[rows], ys, cand)
        if split_at is None:
            leaf[node] = 1 if n1 * 2 > ys.size else 0
            continue
        _, f, thr = split_at
        go_left = X[rows, f] < thr
        feature[node] = int(feature_idx[f])
        threshold[node] = thr
        left[node] = new_node()
        right[node] = new_node()
        stack.append((left[node], rows[go_left], depth + 1))
        stack.append((right[node], rows[~go_left], depth + 1))
    return {
        "feature": np.asarray(feature, dtype=np.int64),
        "threshold": np.asarray(threshold, dtype=np.float64),
        "left": np.asarray(left, dtype=np.int64),
        "right": np.asarray(right, dtype=np.int64),
        "leaf": np.asarray(leaf, dtype=np.int64),
    }


def _rf_train(spec, X, y, feature_idx):
    if len(np.unique(y)) < 2:
        raise DataError("random forest needs both classes in the training rows")
    n_candidates = max(1, math.ceil(math.sqrt(X.shape[1])))
    trees = []
    for t in range(spec.rf_trees):
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, t]))
        sample = rng.integers(0, y.size, y.size)
        trees.append(
            _grow_tree(X[sample], y[sample], rng, spec.rf_max_depth, n_candidates, feature_idx)
        )
    return {"trees": trees}


def _apply_tree(tree, rows_fullwidth):
    node = np.zeros(rows_fullwidth.shape[0], dtype=np.int64)
    active = tree["leaf"][node] < 0
    while active.any():
        idx = np.nonzero(active)[0]
        cur = node[idx]
        vals = rows_fullwidth[idx, tree["feature"][cur]]
        node[idx] = np.where(vals < tree["threshold"][cur], tree["left"][cur], tree["right"][cur])
        active = tree["leaf"][node] < 0
    return tree["leaf"][node]


def _rf_predict(model, X):
    # trees record original column indices, so rebuild full-width rows
    full = np.zeros((X.shape[0], model.mask.size))
    full[:, model.feature_idx] = X
    votes = np.zeros(X.shape[0], dtype=np.int64)
    for tree in model.state["trees"]:
        votes += _apply_tree(tree, full)
    n = len(model.state["trees"])
    # majority of tree votes; an even split falls back to label 0
    return (votes * 2 > n).astype(np.int64)


# ---------------------------------------------------------------- linear SVM

def _svm_train(spec, X, y):
    if len(np.unique(y)) < 2:
        raise DataError("SVM needs both classes in the training rows")
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    sigma = np.where(sigma == 0, 1.0, sigma)
    Xs = (X - mu) / sigma
    ys = np.where(y == 1, 1.0, -1.0)
    n, m = Xs.shape
    w = np.zeros(m)
    b = 0.0
    lam = spec.svm_regularization
    lr = spec.svm_learning_rate

    def loss(w, b):
        margins = 1.0 - ys * (Xs @ w + b)
        hinge = np.maximum(margins, 0.0).mean()
        return float(hinge + 0.5 * lam * (w @ w))

    history = [loss(w, b)]
    for _ in range(spec.svm_epochs):
        active = ys * (Xs @ w + b) < 1.0
        grad_w = lam * w - (ys[active, None] * Xs[active]).sum(axis=0) / n
        grad_b = -ys[active].sum() / n
        w = w - lr * grad_w
        b = b - lr * grad_b
        history.append(loss(w, b))
    return {"w": w, "b": b, "mu": mu, "sigma": sigma, "loss_history": history}


def _svm_predict(model, X):
    st = model.state
    score = ((X - st["mu"]) / st["sigma"]) @ st["w"] + st["b"]
    # points on the boundary get the positive label
    return (score >= 0).astype(np.int64)


# ---------------------------------------------------------------- public ops

def train(spec: ClassifierSpec, d: Dataset, rows, mask) -> TrainedModel:
    """Fit one classifier on a row subset restricted to the masked columns.

    Scaling parameters (min-max for KNN, standardization for the SVM) are fit
    on the given rows only and stored inside the model.

    Raises:
        DataError: single-class training rows for RF or SVM.
        ValueError: empty mask or malformed arguments.
    """
    mask = _validate_mask(mask, d.n_cols)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size < 1:
        raise ValueError("need at least one training row")
    feature_idx = np.nonzero(mask)[0]
    X = d.features[np.ix_(rows, feature_idx)]
    y = d.labels[rows]
    params = {
        "knn_k": spec.knn_k,
        "rf_trees": spec.rf_trees,
        "rf_max_depth": spec.rf_max_depth,
        "svm_epochs": spec.svm_epochs,
        "svm_learning_rate": spec.svm_learning_rate,
        "svm_regularization": spec.svm_regularization,
        "seed": spec.seed,
    }
    model = TrainedModel(spec.kind, mask, feature_idx, params)
    if spec.kind == "knn":
        model.state = _knn_train(spec, X, y)
    elif spec.kind == "rf":
        model.state = _rf_train(spec, X, y, feature_idx)
    else:
        model.state = _svm_train(spec, X, y)
    return model


def predict(m: TrainedModel, row) -> int:
    """Classify one full-width feature row with a trained model."""
    return m.predict(row)


def evaluate_masked(spec: ClassifierSpec, d: Dataset, train_rows, eval_rows, mask):
    """Train on train_rows, predict eval_rows, return the confusion counts.

    Raises:
        ValueError: if the row sets overlap or eval_rows is empty.
    """
    from .evaluation import ConfusionMatrix

    train_rows = np.asarray(train_rows, dtype=np.int64)
    eval_rows = np.asarray(eval_rows, dtype=np.int64)
    if eval_rows.size == 0:
        raise ValueError("eval_rows is empty")
    if np.intersect1d(train_rows, eval_rows).size:
        raise ValueError("train and evaluation rows overlap")
    model = train(spec, d, train_rows, mask)
    pred = model.predict_rows(d.features[eval_rows])
    truth = d.labels[eval_rows]
    tp = int(((pred == 1) & (truth == 1)).sum())
    fp = int(((pred == 1) & (truth == 0)).sum())
    tn = int(((pred == 0) & (truth == 0)).sum())
    fn = int(((pred == 0) & (truth == 1)).sum())
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)
