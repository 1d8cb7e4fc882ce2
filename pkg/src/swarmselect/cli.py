"""Command-line front end.

Subcommands: synth, rank, select, evaluate, grid, report.  Every command
prints a JSON manifest of written files on success.  Exit codes: 0 success,
1 usage error, 2 rejected input (file content or config values), 3 internal
error.  Failures print a single machine-parsable line to stderr:
``swarmselect: error: <code>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifiers import KINDS, ClassifierSpec, evaluate_masked
from .data import SynthSpec, clean, load_csv, normalize_minmax, split, synthesize, write_csv
from .errors import DataError, SwarmSelectError
from .evaluation import cross_validate, feature_reduction, fitness, format_percent, metrics
from .optimizers import ALGORITHMS, SelectorConfig, run_selector
from .pipeline import (
    GridConfig,
    hex_to_mask,
    mask_to_hex,
    run_grid,
    select_best,
)
from .ranking import METHODS, leading_mask, rank_features


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _fail(code: str, message: str) -> None:
    line = " ".join(str(message).split())
    print(f"swarmselect: error: {code}: {line}", file=sys.stderr)


def _formats(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _names(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _load_dataset(args):
    ds = load_csv(args.data, args.label_column, args.positive_label)
    ds, _ = clean(ds)
    ds, _ = normalize_minmax(ds)
    return ds


def _write_json(path: Path, payload) -> dict:
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return {"path": path.name, "bytes": path.stat().st_size}


def _emit_manifest(entries) -> None:
    print(json.dumps(list(entries)))


def _add_data_flags(p):
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--label-column", default="label")
    p.add_argument("--positive-label", default="1",
                   help="label token mapped to class 1 (e.g. ASD)")


# ---------------------------------------------------------------- commands

def _cmd_synth(args):
    spec = SynthSpec(
        n_rows=args.rows, n_cols=args.cols, n_informative=args.informative,
        class_separation=args.separation, redundant_pairs=args.redundant_pairs,
        seed=args.seed,
    )
    ds, true_mask = synthesize(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(ds, out)
    sidecar = out.with_suffix(out.suffix + ".mask.json")
    entry = _write_json(sidecar, {
        "true_mask": mask_to_hex(true_mask),
        "informative": [n for n, b in zip(ds.column_names, true_mask) if b],
        "spec": {
            "n_rows": spec.n_rows, "n_cols": spec.n_cols,
            "n_informative": spec.n_informative,
            "class_separation": spec.class_separation,
            "redundant_pairs": spec.redundant_pairs, "seed": spec.seed,
        },
    })
    _emit_manifest([{"path": out.name, "bytes": out.stat().st_size}, entry])
    return 0


def _cmd_rank(args):
    from .report import ranking_heatmap

    ds = _load_dataset(args)
    methods = METHODS if args.method == "all" else (args.method,)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    scores_by_method = {}
    for method in methods:
        ranked = rank_features(ds, method)
        scores_by_method[method] = ranked.scores
        payload = {
            "method": method,
            "features": [
                {"rank": pos + 1, "feature": ds.column_names[j], "score": float(ranked.scores[j])}
                for pos, j in enumerate(ranked.order)
            ],
            "order": [int(j) for j in ranked.order],
        }
        if "json" in args.formats:
            entries.append(_write_json(out / f"ranking_{method}.json", payload))
        if "csv" in args.formats:
            path = out / f"ranking_{method}.csv"
            lines = ["Rank,Feature,Score"]
            lines += [
                f"{pos + 1},{ds.column_names[j]},{float(ranked.scores[j])!r}"
                for pos, j in enumerate(ranked.order)
            ]
            path.write_text("\n".join(lines) + "\n")
            entries.append({"path": path.name, "bytes": path.stat().st_size})
    if "svg" in args.formats:
        path = out / "ranking_heatmap.svg"
        ranking_heatmap(scores_by_method, list(ds.column_names), path)
        entries.append({"path": path.name, "bytes": path.stat().st_size})
    _emit_manifest(entries)
    return 0


def _cmd_select(args):
    ds = _load_dataset(args)
    parts = split(ds, args.train_frac, args.validate_frac, args.seed)
    trainval = ds.take_rows(np.concatenate([parts.train, parts.validate]))
    ranked = rank_features(trainval, args.ranker)
    lead = leading_mask(ranked, args.leading_k)
    spec = ClassifierSpec(kind=args.classifier, knn_k=args.knn_k, rf_trees=args.rf_trees,
                          seed=args.seed)
    total = ds.n_cols

    def fitness_fn(mask):
        cm = evaluate_masked(spec, ds, parts.train, parts.validate, mask)
        return fitness(cm, mask, total, args.fitness_weight).value

    result = run_selector(
        SelectorConfig(
            algorithm=args.algorithm, num_agents=args.agents,
            max_iterations=args.iterations, seed=args.seed,
            leading_mask=lead, transfer=args.transfer,
        ),
        total, fitness_fn,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entry = _write_json(out / "selection.json", {
        "algorithm": result.algorithm,
        "ranker": args.ranker,
        "classifier": args.classifier,
        "seed": result.seed,
        "n_features": result.n_features,
        "best_mask": mask_to_hex(result.best_mask),
        "selected_features": [n for n, b in zip(ds.column_names, result.best_mask) if b],
        "n_selected": int(result.best_mask.sum()),
        "feature_reduction": feature_reduction(int(result.best_mask.sum()), total),
        "best_fitness": result.best_fitness,
        "fitness_history": list(result.fitness_history),
        "evaluations": result.evaluations,
        "budget": result.budget,
    })
    _emit_manifest([entry])
    return 0


def _cmd_evaluate(args):
    ds = _load_dataset(args)
    if args.mask:
        mask = hex_to_mask(args.mask, ds.n_cols)
    else:
        payload = json.loads(Path(args.mask_file).read_text())
        mask = hex_to_mask(payload["best_mask"], ds.n_cols)
    if mask.sum() == 0:
        raise DataError("mask selects no features")
    parts = split(ds, args.train_frac, args.validate_frac, args.seed)
    spec = ClassifierSpec(kind=args.classifier, knn_k=args.knn_k, rf_trees=args.rf_trees,
                          seed=args.seed)
    trainval = np.concatenate([parts.train, parts.validate])
    report = metrics(evaluate_masked(spec, ds, trainval, parts.test, mask))
    cv = cross_validate(spec, ds, mask, args.cv, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n_sel = int(mask.sum())
    entry = _write_json(out / "evaluation.json", {
        "classifier": args.classifier,
        "seed": args.seed,
        "mask": mask_to_hex(mask),
        "n_selected": n_sel,
        "feature_reduction": feature_reduction(n_sel, ds.n_cols),
        "feature_reduction_pct": format_percent(feature_reduction(n_sel, ds.n_cols)),
        "test_metrics": report.to_dict(),
        "cv_accuracies": list(cv.accuracies),
        "cv_mean": cv.mean,
        "cv_std": cv.std,
    })
    _emit_manifest([entry])
    return 0


def _grid_config(args) -> tuple[GridConfig, dict]:
    payload = {}
    data_block = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        if not isinstance(raw, dict):
            raise DataError(f"{args.config}: config must be a JSON object")
        data_block = {k: raw.pop(k) for k in ("data", "synth") if k in raw}
        payload.update(raw)
    overrides = {
        "seed": args.seed,
        "rankers": args.rankers,
        "selectors": args.selectors,
        "classifiers": args.classifiers,
        "num_agents": args.agents,
        "max_iterations": args.iterations,
        "surrogate": args.surrogate,
        "cv_k": args.cv_k,
        "rf_trees": args.rf_trees,
        "knn_k": args.knn_k,
    }
    for key, value in overrides.items():
        if value is not None:
            payload[key] = value
    try:
        cfg = GridConfig.from_dict(payload)
    except (TypeError, ValueError) as exc:
        raise DataError(f"invalid grid config: {exc}") from exc
    return cfg, data_block


def _grid_dataset(args, data_block):
    sources = [bool(args.data), "data" in data_block, "synth" in data_block]
    if sum(sources) != 1:
        raise DataError("exactly one data source required: --data flag, config 'data', or config 'synth'")
    if args.data:
        return _load_dataset(args)
    if "data" in data_block:
        block = data_block["data"]
        ds = load_csv(block["path"], block.get("label_column", "label"),
                      block.get("positive_label", "1"))
    else:
        try:
            spec = SynthSpec(**data_block["synth"])
        except TypeError as exc:
            raise DataError(f"invalid synth block: {exc}") from exc
        ds, _ = synthesize(spec)
    ds, _ = clean(ds)
    ds, _ = normalize_minmax(ds)
    return ds


def _cmd_grid(args):
    from .report import emit_report

    cfg, data_block = _grid_config(args)
    ds = _grid_dataset(args, data_block)
    results = run_grid(ds, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = emit_report(results, out, args.formats)
    best = select_best(results)
    manifest.append(_write_json(out / "best.json", best.to_dict()))
    _emit_manifest(manifest)
    return 0


def _cmd_report(args):
    from .pipeline import CombinationResult
    from .report import emit_report

    raw = json.loads(Path(args.results).read_text())
    if not isinstance(raw, list):
        raise DataError(f"{args.results}: expected a JSON array of results")
    results = [CombinationResult.from_dict(item) for item in raw]
    manifest = emit_report(results, Path(args.out), args.formats)
    _emit_manifest(manifest)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> _Parser:
    parser = _Parser(prog="swarmselect",
                     description="Wrapper feature selection with nature-inspired optimizers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labelled dataset")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--informative", type=int, required=True)
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--redundant-pairs", type=int, default=0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("rank", help="rank features against the labels")
    _add_data_flags(p)
    p.add_argument("--method", choices=METHODS + ("all",), default="all")
    p.add_argument("--formats", type=_formats, default=("json", "csv"),
                   help="comma-separated subset of json,csv,svg")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--out", default="rankings")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("select", help="run one metaheuristic feature search")
    _add_data_flags(p)
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS), required=True)
    p.add_argument("--ranker", choices=METHODS, default="relief")
    p.add_argument("--classifier", choices=KINDS, default="knn",
                   help="wrapper classifier scoring candidate masks")
    p.add_argument("--agents", type=int, default=30)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--leading-k", type=int, default=None)
    p.add_argument("--transfer", choices=("standard", "literal"), default="standard")
    p.add_argument("--fitness-weight", type=float, default=0.8)
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--validate-frac", type=float, default=0.1)
    p.add_argument("--knn-k", type=int, default=5)
    p.add_argument("--rf-trees", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--out", default="selection")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("evaluate", help="score a feature mask with one classifier")
    _add_data_flags(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--mask", help="hex mask, feature 0 = most significant bit")
    group.add_argument("--mask-file", help="selection.json from the select command")
    p.add_argument("--classifier", choices=KINDS, required=True)
    p.add_argument("--cv", type=int, default=10)
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--validate-frac", type=float, default=0.1)
    p.add_argument("--knn-k", type=int, default=5)
    p.add_argument("--rf-trees", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--out", default="evaluation")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("grid", help="run the full ranker x selector x classifier sweep")
    p.add_argument("--config", help="JSON config; flags override its values")
    p.add_argument("--data", help="CSV data file (alternative to config data/synth)")
    p.add_argument("--label-column", default="label")
    p.add_argument("--positive-label", default="1")
    p.add_argument("--rankers", type=_names, default=None)
    p.add_argument("--selectors", type=_names, default=None)
    p.add_argument("--classifiers", type=_names, default=None)
    p.add_argument("--agents", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--surrogate", choices=("knn",), default=None)
    p.add_argument("--cv-k", type=int, default=None)
    p.add_argument("--rf-trees", type=int, default=None)
    p.add_argument("--knn-k", type=int, default=None)
    p.add_argument("--formats", type=_formats, default=("json", "csv", "svg"))
    p.add_argument("--seed", type=int, default=None, help="master seed (default 42)")
    p.add_argument("-o", "--out", default="grid-report")
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("report", help="re-emit report files from results.json")
    p.add_argument("--results", required=True)
    p.add_argument("--formats", type=_formats, default=("csv", "svg"))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("-o", "--out", default="report")
    p.set_defaults(func=_cmd_report)
    return parser


def execute(argv=None) -> int:
    """Parse arguments and run one subcommand, mapping failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _fail("usage", str(exc))
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        _fail("usage", str(exc))
        return 1
    except (SwarmSelectError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        _fail("data", f"{type(exc).__name__}: {exc}")
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        _fail("internal", f"{type(exc).__name__}: {exc}")
        return 3


def main(argv=None) -> int:
    return execute(argv)


if __name__ == "__main__":
    sys.exit(main())
