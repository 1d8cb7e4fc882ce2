"""Report emission: delimited results plus matplotlib-rendered SVG figures.

Outputs are byte-stable for identical inputs: JSON keys keep insertion
order, CSV floats are formatted explicitly, and the SVG backend is salted
with a fixed hash seed and stripped of timestamp metadata.
"""

from __future__ import annotations

import csv
import json
import math
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .evaluation import format_percent  # noqa: E402
from .pipeline import CombinationResult  # noqa: E402

FORMATS = ("json", "csv", "svg")

RESULTS_COLUMNS = [
    "Ranking", "NatureAlgo", "MLAlgo",
    "Accuracy", "RecallAutism", "RecallTypical",
    "PrecisionAutism", "PrecisionTypical", "F1Autism", "F1Typical",
    "SelectedFeatures", "FeatureReduction", "CVMean", "CVStd",
    "Fitness", "Evaluations", "GatesPassed", "Seed", "Error",
]

plt.rcParams["svg.hashsalt"] = "swarmselect"


def _fmt(value: float, places: int = 5) -> str:
    """Fixed-point with half-up rounding, e.g. 0.993711 -> '0.99371'."""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP))


def _results_rows(results):
    for r in results:
        if r.error is not None:
            yield [r.ranker, r.selector, r.classifier] + [""] * 15 + [r.error]
            continue
        m = r.test_metrics
        yield [
            r.ranker, r.selector, r.classifier,
            _fmt(m.accuracy), _fmt(m.recall_autism), _fmt(m.recall_typical),
            _fmt(m.precision_autism), _fmt(m.precision_typical),
            _fmt(m.f1_autism), _fmt(m.f1_typical),
            str(r.n_selected), format_percent(r.reduction),
            _fmt(r.cv.mean), _fmt(r.cv.std), _fmt(r.fitness.value),
            str(r.evaluations), str(r.gates_passed).lower(), str(r.seed), "",
        ]


def _summary_rows(results):
    """Best row per selector: accuracy, then fewer features, then name."""
    by_selector: dict[str, CombinationResult] = {}
    for r in results:
        if r.error is not None:
            continue
        cur = by_selector.get(r.selector)
        key = lambda x: (-x.test_metrics.accuracy, x.n_selected, (x.ranker, x.classifier))
        if cur is None or key(r) < key(cur):
            by_selector[r.selector] = r
    for name in sorted(by_selector):
        r = by_selector[name]
        acc_pct = f"{r.test_metrics.accuracy * 100:g}%"
        yield [name, acc_pct, str(r.n_selected), format_percent(r.reduction)]


def accuracy_figure(results, path) -> int:
    """Grouped bar chart of test accuracy: one bar per (selector, classifier)
    within each ranker group.  Returns the number of bars drawn."""
    ok = [r for r in results if r.error is None]
    rankers = sorted({r.ranker for r in ok})
    pairs = sorted({(r.selector, r.classifier) for r in ok})
    selectors = sorted({r.selector for r in ok})
    cmap = plt.get_cmap("tab10")
    colors = {s: cmap(i % 10) for i, s in enumerate(selectors)}
    lookup = {(r.ranker, r.selector, r.classifier): r for r in ok}

    group_w = len(pairs) + 2
    fig_w = max(7.0, 0.28 * group_w * max(1, len(rankers)))
    fig, ax = plt.subplots(figsize=(fig_w, 4.8))
    drawn = 0
    for gi, ranker in enumerate(rankers):
        for pi, (sel, clf) in enumerate(pairs):
            r = lookup.get((ranker, sel, clf))
            if r is None:
                continue
            x = gi * group_w + pi
            bar = ax.bar(x, r.test_metrics.accuracy, width=0.85, color=colors[sel])[0]
            bar.set_gid(f"bar-{ranker}-{sel}-{clf}")
            ax.annotate(_fmt(r.test_metrics.accuracy, 3), (x, r.test_metrics.accuracy),
                        ha="center", va="bottom", fontsize=5, rotation=90)
            drawn += 1
    centers = [gi * group_w + (len(pairs) - 1) / 2 for gi in range(len(rankers))]
    ax.set_xticks(centers)
    ax.set_xticklabels(rankers)
    ax.set_ylim(0, 1.12)
    ax.set_ylabel("test accuracy")
    handles = [plt.Rectangle((0, 0), 1, 1, color=colors[s]) for s in selectors]
    ax.legend(handles, selectors, ncol=min(7, len(selectors)), fontsize=7,
              loc="upper center", bbox_to_anchor=(0.5, -0.12))
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return drawn


def ranking_heatmap(scores_by_method: dict, feature_names, path) -> None:
    """Methods x features score matrix rendered as a heatmap."""
    methods = list(scores_by_method)
    matrix = [list(map(float, scores_by_method[m])) for m in methods]
    fig_w = max(6.0, 0.22 * len(feature_names))
    fig, ax = plt.subplots(figsize=(fig_w, 1.2 + 0.6 * len(methods)))
    im = ax.imshow(matrix, aspect="auto", cmap="viridis")
    ax.set_yticks(range(len(methods)))
    ax.set_yticklabels(methods)
    step = max(1, math.ceil(len(feature_names) / 40))
    ax.set_xticks(range(0, len(feature_names), step))
    ax.set_xticklabels([feature_names[i] for i in range(0, len(feature_names), step)],
                       rotation=90, fontsize=6)
    fig.colorbar(im, ax=ax, label="score")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_report(results: list[CombinationResult], out_dir,
                formats=("json", "csv", "svg")) -> list[dict]:
    """Write the selected formats plus a manifest; returns the manifest.

    json -> results.json (array of combination dicts, insertion-ordered)
    csv  -> results.csv (fixed column order) and summary.csv (best per selector)
    svg  -> accuracy.svg (grouped bars, values embedded)
    """
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown report formats: {sorted(unknown)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def record(path: Path):
        written.append({"path": path.name, "bytes": path.stat().st_size})

    if "json" in formats:
        path = out / "results.json"
        path.write_text(json.dumps([r.to_dict() for r in results], indent=2) + "\n")
        record(path)
    if "csv" in formats:
        path = out / "results.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULTS_COLUMNS)
            writer.writerows(_results_rows(results))
        record(path)
        path = out / "summary.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["NatureAlgo", "Accuracy", "SelectedFeatures", "FeatureReduction"])
            writer.writerows(_summary_rows(results))
        record(path)
    if "svg" in formats:
        path = out / "accuracy.svg"
        accuracy_figure(results, path)
        record(path)

    manifest = out / "manifest.json"
    manifest.write_text(json.dumps(written, indent=2) + "\n")
    return written
