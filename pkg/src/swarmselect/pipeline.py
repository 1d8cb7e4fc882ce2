"""End-to-end combination runs and the ranker x selector x classifier grid.

A combination ranks features on the non-test rows, seeds the selector with
the top-ranked half, searches for a mask against validation fitness, then
trains the final classifier on train+validate and reports test metrics plus
a k-fold cross-validation of the selected mask.  Test rows never reach the
ranking or the selection objective, so corrupting their labels cannot change
which features are chosen.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .classifiers import KINDS, ClassifierSpec, evaluate_masked
from .data import Dataset, SplitIndices, split
from .errors import SwarmSelectError
from .evaluation import (
    CVResult,
    FitnessValue,
    MetricsReport,
    cross_validate,
    feature_reduction,
    fitness,
    metrics,
)
from .optimizers import ALGORITHMS, SelectorConfig, run_selector
from .ranking import METHODS, RankedFeatures, leading_mask, rank_features

THREADS_ENV = "SWARMSELECT_THREADS"


def mask_to_hex(mask) -> str:
    """Encode a 0/1 vector as hex; feature 0 is the most significant bit."""
    mask = np.asarray(mask, dtype=np.uint8)
    if mask.size == 0:
        raise ValueError("mask is empty")
    value = int("".join("1" if b else "0" for b in mask), 2)
    return f"{value:0{math.ceil(mask.size / 4)}x}"


def hex_to_mask(text: str, n_features: int) -> np.ndarray:
    value = int(text, 16)
    if value >= 1 << n_features:
        raise ValueError(f"hex mask {text!r} does not fit {n_features} features")
    bits = bin(value)[2:].zfill(n_features)
    return np.array([int(c) for c in bits], dtype=np.uint8)


@dataclass(frozen=True)
class GridConfig:
    """Sweep axes plus every tunable the pipeline consumes."""

    rankers: tuple[str, ...] = METHODS
    selectors: tuple[str, ...] = ("gsa", "bba", "cs", "ga", "gwo", "pso", "woa")
    classifiers: tuple[str, ...] = ("knn", "rf", "svm")
    seed: int = 42
    train_frac: float = 0.8
    validate_frac: float = 0.1
    cv_k: int = 10
    fitness_weight: float = 0.8
    accuracy_gate: float = 0.85
    cv_gate: float = 0.85
    retries: int = 3
    num_agents: int = 30
    max_iterations: int = 100
    transfer: str = "standard"
    leading_k: int | None = None
    surrogate: str | None = None  # "knn" evaluates wrapper fitness with KNN
    selector_params: dict = field(default_factory=dict)  # {algorithm: {param: value}}
    knn_k: int = 5
    rf_trees: int = 100
    rf_max_depth: int | None = None
    svm_epochs: int = 200
    svm_learning_rate: float = 0.01
    svm_regularization: float = 0.01

    def __post_init__(self):
        for name, pool in (("rankers", METHODS), ("selectors", tuple(ALGORITHMS)),
                           ("classifiers", KINDS)):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} must not be empty")
            unknown = set(values) - set(pool)
            if unknown:
                raise ValueError(f"unknown {name}: {sorted(unknown)}")
            if len(set(values)) != len(values):
                raise ValueError(f"duplicate entries in {name}")
            object.__setattr__(self, name, values)
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not (0 < self.train_frac < 1 and 0 < self.validate_frac < 1
                and self.train_frac + self.validate_frac < 1):
            raise ValueError("split fractions must be positive and sum below 1")
        if not (0 <= self.fitness_weight <= 1):
            raise ValueError("fitness_weight must lie in [0, 1]")
        if not (0 <= self.accuracy_gate <= 1 and 0 <= self.cv_gate <= 1):
            raise ValueError("gates must lie in [0, 1]")
        if self.retries < 1:
            raise ValueError("retries must be at least 1")
        if self.cv_k < 2:
            raise ValueError("cv_k must be at least 2")
        if self.surrogate not in (None, "knn"):
            raise ValueError("surrogate must be None or 'knn'")
        if self.leading_k is not None and self.leading_k < 1:
            raise ValueError("leading_k must be positive")

    @classmethod
    def from_dict(cls, payload: dict) -> "GridConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        coerced = dict(payload)
        for key in ("rankers", "selectors", "classifiers"):
            if key in coerced:
                coerced[key] = tuple(coerced[key])
        return cls(**coerced)

    def to_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        return out


@dataclass(frozen=True)
class CombinationResult:
    """One (ranker, selector, classifier) outcome.

    wall_time is informational only and deliberately excluded from to_dict()
    so serialized grids are byte-identical across reruns.
    """

    ranker: str
    selector: str
    classifier: str
    seed: int
    combo_index: int
    selected_mask: np.ndarray | None = None
    selected_features: tuple[str, ...] = ()
    n_features: int = 0
    test_metrics: MetricsReport | None = None
    cv: CVResult | None = None
    fitness: FitnessValue | None = None
    evaluations: int = 0
    gates_passed: bool = False
    attempts: int = 0
    wall_time: float = 0.0
    error: str | None = None

    @property
    def n_selected(self) -> int:
        return 0 if self.selected_mask is None else int(self.selected_mask.sum())

    @property
    def reduction(self) -> float:
        if self.selected_mask is None:
            return 0.0
        return feature_reduction(self.n_selected, self.n_features)

    def to_dict(self) -> dict:
        out = {
            "ranker": self.ranker,
            "selector": self.selector,
            "classifier": self.classifier,
            "seed": self.seed,
            "combo_index": self.combo_index,
            "error": self.error,
        }
        if self.error is not None:
            return out
        out.update({
            "n_features": self.n_features,
            "selected_mask": mask_to_hex(self.selected_mask),
            "selected_features": list(self.selected_features),
            "n_selected": self.n_selected,
            "feature_reduction": self.reduction,
            "fitness": self.fitness.value,
            "test_metrics": self.test_metrics.to_dict(),
            "cv_accuracies": list(self.cv.accuracies),
            "cv_mean": self.cv.mean,
            "cv_std": self.cv.std,
            "evaluations": self.evaluations,
            "gates_passed": self.gates_passed,
            "attempts": self.attempts,
        })
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "CombinationResult":
        """Rebuild a result from its to_dict form (report re-emission)."""
        base = dict(
            ranker=payload["ranker"], selector=payload["selector"],
            classifier=payload["classifier"], seed=payload["seed"],
            combo_index=payload["combo_index"], error=payload.get("error"),
        )
        if base["error"] is not None:
            return cls(**base)
        tm = dict(payload["test_metrics"])
        tm["flags"] = tuple(tm.get("flags", ()))
        mask = hex_to_mask(payload["selected_mask"], payload["n_features"])
        n_sel = payload["n_selected"]
        return cls(
            **base,
            selected_mask=mask,
            selected_features=tuple(payload["selected_features"]),
            n_features=payload["n_features"],
            test_metrics=MetricsReport(**tm),
            cv=CVResult(tuple(payload["cv_accuracies"]), payload["cv_mean"],
                        payload["cv_std"]),
            fitness=FitnessValue(payload["fitness"], payload["test_metrics"]["accuracy"],
                                 payload["feature_reduction"], n_sel),
            evaluations=payload["evaluations"],
            gates_passed=payload["gates_passed"],
            attempts=payload["attempts"],
        )


def _derived_seed(master: int, combo_index: int, attempt: int) -> int:
    return int(np.random.SeedSequence([master, combo_index, attempt]).generate_state(1)[0])


def _classifier_spec(kind: str, cfg: GridConfig, seed: int) -> ClassifierSpec:
    return ClassifierSpec(
        kind=kind,
        knn_k=cfg.knn_k,
        rf_trees=cfg.rf_trees,
        rf_max_depth=cfg.rf_max_depth,
        svm_epochs=cfg.svm_epochs,
        svm_learning_rate=cfg.svm_learning_rate,
        svm_regularization=cfg.svm_regularization,
        seed=seed,
    )


def run_combination(s1: str, s2: str, s3: str, d: Dataset, cfg: GridConfig,
                    combo_index: int = 0, split_indices: SplitIndices | None = None,
                    ranked: RankedFeatures | None = None) -> CombinationResult:
    """Run one ranker/selector/classifier triple on a cleaned, normalized dataset.

    The selector seed derives from (cfg.seed, combo_index, attempt); a result
    missing either quality gate is retried with a fresh derived seed up to
    cfg.retries attempts, keeping the best test accuracy seen.
    """
    started = time.perf_counter()
    if split_indices is None:
        split_indices = split(d, cfg.train_frac, cfg.validate_frac, cfg.seed)
    train_rows = split_indices.train
    val_rows = split_indices.validate
    test_rows = split_indices.test

    if ranked is None:
        trainval = d.take_rows(np.concatenate([train_rows, val_rows]))
        ranked = rank_features(trainval, s1)
    lead = leading_mask(ranked, cfg.leading_k)

    best = None
    for attempt in range(cfg.retries):
        seed = _derived_seed(cfg.seed, combo_index, attempt)
        wrapper_kind = cfg.surrogate if cfg.surrogate else s3
        wrapper_spec = _classifier_spec(wrapper_kind, cfg, seed)
        total = d.n_cols

        def fitness_fn(mask):
            cm = evaluate_masked(wrapper_spec, d, train_rows, val_rows, mask)
            return fitness(cm, mask, total, cfg.fitness_weight).value

        sel = run_selector(
            SelectorConfig(
                algorithm=s2,
                num_agents=cfg.num_agents,
                max_iterations=cfg.max_iterations,
                seed=seed,
                leading_mask=lead,
                transfer=cfg.transfer,
                params=dict(cfg.selector_params.get(s2, {})),
            ),
            d.n_cols,
            fitness_fn,
        )
        final_spec = _classifier_spec(s3, cfg, seed)
        trainval_rows = np.concatenate([train_rows, val_rows])
        cm = evaluate_masked(final_spec, d, trainval_rows, test_rows, sel.best_mask)
        report = metrics(cm)
        cv = cross_validate(final_spec, d, sel.best_mask, cfg.cv_k, cfg.seed)
        fit = fitness(
            evaluate_masked(wrapper_spec, d, train_rows, val_rows, sel.best_mask),
            sel.best_mask, total, cfg.fitness_weight,
        )
        names = tuple(n for n, b in zip(d.column_names, sel.best_mask) if b)
        gates = report.accuracy >= cfg.accuracy_gate and cv.mean >= cfg.cv_gate
        result = CombinationResult(
            ranker=s1, selector=s2, classifier=s3, seed=seed, combo_index=combo_index,
            selected_mask=np.asarray(sel.best_mask, dtype=np.uint8),
            selected_features=names, n_features=d.n_cols,
            test_metrics=report, cv=cv, fitness=fit,
            evaluations=sel.evaluations, gates_passed=gates, attempts=attempt + 1,
        )
        if best is None or result.test_metrics.accuracy > best.test_metrics.accuracy:
            best = result
        if gates:
            best = result
            break
    return replace(best, wall_time=time.perf_counter() - started)


def run_grid(d: Dataset, cfg: GridConfig,
             split_indices: SplitIndices | None = None) -> list[CombinationResult]:
    """Run every combination in lexicographic (ranker, selector, classifier) order.

    Rankings are computed once per ranker.  The SWARMSELECT_THREADS
    environment variable caps the worker threads (default 1); results are
    assembled in combination order regardless of schedule, and a failed
    combination is recorded with its error while the rest of the grid runs.
    """
    if split_indices is None:
        split_indices = split(d, cfg.train_frac, cfg.validate_frac, cfg.seed)
    trainval = d.take_rows(np.concatenate([split_indices.train, split_indices.validate]))
    rankings = {name: rank_features(trainval, name) for name in sorted(cfg.rankers)}

    combos = [
        (s1, s2, s3)
        for s1 in sorted(cfg.rankers)
        for s2 in sorted(cfg.selectors)
        for s3 in sorted(cfg.classifiers)
    ]

    def one(indexed):
        index, (s1, s2, s3) = indexed
        try:
            return run_combination(s1, s2, s3, d, cfg, index, split_indices, rankings[s1])
        except (SwarmSelectError, ValueError) as exc:
            return CombinationResult(
                ranker=s1, selector=s2, classifier=s3,
                seed=_derived_seed(cfg.seed, index, 0), combo_index=index,
                error=f"{type(exc).__name__}: {exc}",
            )

    workers = int(os.environ.get(THREADS_ENV, "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, enumerate(combos)))
    return [one(item) for item in enumerate(combos)]


def select_best(results: list[CombinationResult]) -> CombinationResult:
    """Pick the winner: highest test accuracy, then fewest features, then
    lowest CV std, then lexicographic combination name."""
    usable = [r for r in results if r.error is None]
    if not usable:
        raise SwarmSelectError("no combination completed successfully")
    return min(
        usable,
        key=lambda r: (
            -r.test_metrics.accuracy,
            r.n_selected,
            r.cv.std,
            (r.ranker, r.selector, r.classifier),
        ),
    )
