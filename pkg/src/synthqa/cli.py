"""Command-line interface: evaluate, plot, validate, tune, rank, refsynth.

Every command is deterministic given identical inputs and seeds. Exit codes:
0 success, 2 usage or data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import glob as globmod
import json
import os
import shlex
import sys
import traceback
from pathlib import Path

from . import jsonio
from .domain import load_rules, shipped_rules_path
from .errors import EmptyList, SynthqaError
from .evaluator import DomainValidator, FidelityEvaluator
from .metrics import DEFAULT_BINS, POINT_MEAN, VARIABLE_L1, QualityReport
from .plots import (
    QQSeries,
    ScatterPoint,
    MAX_RENDER_POINTS,
    _subsample,
    qq_series_for_pair,
    render_qq,
    render_scatter,
    scatter_points,
)
from .rank import compare_rankings, rank_models
from .refsynth import corrupt_cells, sample_by_method
from .schema import load_schema
from .table import TableData, load_csv, write_csv
from .tuner import (
    ExternalSynthCommand,
    Study,
    best,
    load_space,
    objectives_for_schema,
    optimize,
)
from .tuner.study import Objective, load_study_config

MODE_FLAGS = {"point-mean": POINT_MEAN, "variable-l1": VARIABLE_L1}


def _default_threads() -> int:
    env = os.environ.get("SYNTHQA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _add_threads_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads", type=int, default=None,
        help="worker threads for per-tuple metric computation "
        "(default: SYNTHQA_THREADS or all cores; results are identical for any value)",
    )


def _threads(args) -> int:
    return args.threads if args.threads else _default_threads()


def _load_pair(real_path: str, synth_path: str, schema_path: str):
    schema = load_schema(schema_path)
    return load_csv(real_path, schema), load_csv(synth_path, schema), schema


def _embed_plot_data(result, real, synth, seed: int) -> dict:
    """Scatter/QQ inputs stored inside the report so cmd_plot needs no data files."""
    plots: dict = {}
    cat1 = result.cat_tables.get(1, [])
    cat2 = result.cat_tables.get(2, [])
    if cat1:
        pts = scatter_points(cat1, 1)
        if len(pts) > MAX_RENDER_POINTS:
            pts = [pts[i] for i in _subsample(len(pts), MAX_RENDER_POINTS, seed)]
        plots["scatter1"] = [p.to_dict() for p in pts]
    if cat2:
        pts = scatter_points(cat2, 2)
        if len(pts) > MAX_RENDER_POINTS:
            pts = [pts[i] for i in _subsample(len(pts), MAX_RENDER_POINTS, seed)]
        plots["scatter2"] = [p.to_dict() for p in pts]
    qq = qq_series_for_pair(real, synth)
    if qq:
        plots["qq"] = [s.to_dict() for s in qq]
    return plots


def _render_plot_files(report_doc: dict, out_dir: Path, log_scale: bool) -> list[Path]:
    plots = report_doc.get("plots")
    if not plots:
        raise SynthqaError(
            "report carries no embedded plot data; re-run evaluate without --no-plot-data"
        )
    dataset = report_doc.get("dataset_id") or "dataset"
    model = report_doc.get("model_id") or "model"
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for degree in (1, 2):
        key = f"scatter{degree}"
        if key in plots:
            pts = [ScatterPoint.from_dict(p) for p in plots[key]]
            title = f"{dataset} / {model}: degree-{degree} marginals"
            svg = render_scatter(pts, title, log_scale=log_scale)
            path = out_dir / f"{dataset}_{model}_scatter{degree}.svg"
            path.write_text(svg, encoding="utf-8")
            written.append(path)
    if "qq" in plots:
        series = [QQSeries.from_dict(s) for s in plots["qq"]]
        svg = render_qq(series, f"{dataset} / {model}: QQ")
        path = out_dir / f"{dataset}_{model}_qq.svg"
        path.write_text(svg, encoding="utf-8")
        written.append(path)
    return written


def cmd_evaluate(args) -> int:
    real, synth, schema = _load_pair(args.real, args.synth, args.schema)
    dataset_id = args.dataset_id or Path(args.real).stem
    model_id = args.model_id or Path(args.synth).stem
    evaluator = FidelityEvaluator(
        mode=MODE_FLAGS[args.mode], n_bins=args.bins, threads=_threads(args)
    ).fit(real)
    result = evaluator.evaluate_full(synth, dataset_id=dataset_id, model_id=model_id)
    report = result.report
    if not args.no_plot_data:
        report.plots = _embed_plot_data(result, real, synth, args.seed)
    jsonio.dump(report.to_dict(), args.out)
    if args.plots:
        _render_plot_files(report.to_dict(), Path(args.plots), args.log_scale)
    return 0


def cmd_plot(args) -> int:
    doc = jsonio.load(args.report)
    _render_plot_files(doc, Path(args.out_dir), args.log_scale)
    return 0


def cmd_validate(args) -> int:
    schema = load_schema(args.schema)
    data = load_csv(args.data, schema)
    rules = load_rules(args.rules)
    reference = None
    if args.fit_ranges_from:
        reference = load_csv(args.fit_ranges_from, schema)
        validator = DomainValidator(rules).fit(reference)
        report = validator.check(data)
    else:
        from .domain import check as check_rules

        report = check_rules(rules, data)
    jsonio.dump(report.to_dict(), args.out)
    csv_path = args.csv or str(Path(args.out).with_suffix(".csv"))
    report.write_csv(csv_path)
    return 0


def cmd_tune(args) -> int:
    space = load_space(args.space)
    schema = load_schema(args.schema)
    config: dict = {}
    if args.study:
        config = load_study_config(args.study)
    budget = args.budget if args.budget is not None else config.get("budget")
    if budget is None:
        raise SynthqaError("budget required (flag --budget or study config)")
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    train_timeout = (
        args.train_timeout if args.train_timeout is not None
        else config.get("train_timeout")
    )
    synth_timeout = (
        args.synth_timeout if args.synth_timeout is not None
        else config.get("synth_timeout")
    )
    objectives = config.get("objectives") or objectives_for_schema(schema)

    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    command = shlex.split(args.command)

    strata = space.strata or (None,)
    outputs = []
    for stratum in strata:
        sub_space = space.apply_stratum(stratum) if stratum else space
        suffix = f"_{stratum.name}" if stratum else ""
        journal = Path(args.journal) if args.journal else workdir / "journal.jsonl"
        if suffix:
            journal = journal.with_name(journal.stem + suffix + journal.suffix)
        study = Study(
            space=sub_space,
            objectives=tuple(objectives),
            budget=int(budget),
            seed=int(seed),
            train_timeout=train_timeout,
            synth_timeout=synth_timeout,
            journal_path=journal,
        )
        study.load_journal()
        adapter = ExternalSynthCommand(
            command=command,
            real_csv=args.real,
            schema=schema,
            schema_path=args.schema,
            workdir=workdir / (stratum.name if stratum else "trials"),
            n_synth=args.n_synth,
            objectives=objectives,
            mode=MODE_FLAGS[args.mode],
            n_bins=args.bins,
        )
        optimize(study, adapter)
        result = best(study)
        trials = result if isinstance(result, list) else [result]
        outputs.append({
            "stratum": stratum.name if stratum else None,
            "journal": str(journal),
            "n_trials": len(study.trials),
            "n_completed": len(study.completed()),
            "best": [t.to_dict() for t in trials],
        })
    print(jsonio.dumps({"objectives": [o.to_dict() for o in objectives],
                        "studies": outputs}))
    return 0


def cmd_rank(args) -> int:
    paths: list[str] = []
    for pattern in args.reports:
        matched = sorted(globmod.glob(pattern))
        paths.extend(matched if matched else [pattern])
    reports = []
    for p in paths:
        doc = jsonio.load(p)
        reports.append(QualityReport.from_dict(doc))
    if not reports:
        raise EmptyList("no reports matched")

    by_dataset: dict[str, list[QualityReport]] = {}
    for r in reports:
        by_dataset.setdefault(r.dataset_id, []).append(r)

    tables = [rank_models(group) for _, group in sorted(by_dataset.items())]
    doc: dict = {"rankings": [t.to_dict() for t in tables]}

    if args.compare:
        metrics = [m.strip() for m in args.compare.split(",") if m.strip()]
        comparisons = []
        for table, (dataset_id, group) in zip(tables, sorted(by_dataset.items())):
            orders = {}
            for metric in metrics:
                from .pareto import MINIMIZE
                from .rank import METRIC_DIRECTIONS

                if any(r.metric(metric) is None for r in group):
                    raise SynthqaError(
                        f"metric {metric!r} undefined for dataset {dataset_id!r}"
                    )
                sign = 1.0 if METRIC_DIRECTIONS[metric] == MINIMIZE else -1.0
                ordered = sorted(group, key=lambda r: (sign * r.metric(metric), r.model_id))
                orders[metric] = [r.model_id for r in ordered]
            comparison = compare_rankings(orders)
            comparisons.append({"dataset_id": dataset_id, **comparison.to_dict()})
            if args.out:
                comparison.write_csv(
                    Path(args.out).with_name(
                        Path(args.out).stem + f"_compare_{dataset_id}.csv"
                    )
                )
        doc["comparisons"] = comparisons

    if args.out:
        # one Table-4-shaped CSV per dataset; single-dataset inputs write --out itself
        if len(tables) == 1:
            tables[0].write_csv(args.out)
        else:
            for t in tables:
                t.write_csv(
                    Path(args.out).with_name(
                        Path(args.out).stem + f"_{t.dataset_id}" + Path(args.out).suffix
                    )
                )
    if args.json:
        jsonio.dump(doc, args.json)
    if not args.out and not args.json:
        print(jsonio.dumps(doc))
    return 0


def cmd_refsynth(args) -> int:
    if args.phase == "sample":
        schema = load_schema(args.schema)
        real = load_csv(args.real, schema)
        table = sample_by_method(real, args.method, args.n, args.seed)
        if args.corrupt:
            table = corrupt_cells(table, real, args.corrupt, args.seed)
        write_csv(table, args.out)
        return 0

    if args.phase == "train":
        workdir = Path(args.workdir)
        workdir.mkdir(parents=True, exist_ok=True)
        with open(args.params, encoding="utf-8") as fh:
            params = json.load(fh)
        model = {
            "real": str(Path(args.real).resolve()),
            "schema": str(Path(args.schema).resolve()),
            "params": params,
        }
        jsonio.dump(model, workdir / "model.json")
        return 0

    # synth phase
    workdir = Path(args.workdir)
    model = jsonio.load(workdir / "model.json")
    params = model.get("params", {})
    schema = load_schema(model["schema"])
    real = load_csv(model["real"], schema)
    method = params.get("method", args.method)
    seed = int(params.get("seed", args.seed))
    table = sample_by_method(real, method, args.n, seed)
    corrupt = float(params.get("corrupt", args.corrupt or 0.0))
    if corrupt:
        table = corrupt_cells(table, real, corrupt, seed)
    write_csv(table, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synthqa",
        description="Fidelity metrics, plots, domain rules and HPO for synthetic tabular data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="compute a fidelity report for a real/synth pair")
    p.add_argument("--real", required=True, help="real data CSV")
    p.add_argument("--synth", required=True, help="synthetic data CSV")
    p.add_argument("--schema", required=True, help="schema JSON")
    p.add_argument("--out", required=True, help="output report JSON path")
    p.add_argument("--plots", help="directory for scatter/QQ SVG files")
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), default="point-mean",
                   help="MAE normalization (default point-mean)")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS,
                   help="equal-width bins for numeric columns (default 10)")
    p.add_argument("--dataset-id", default="", help="dataset label (default: real file stem)")
    p.add_argument("--model-id", default="", help="model label (default: synth file stem)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for plot-point subsampling above the render cap")
    p.add_argument("--no-plot-data", action="store_true",
                   help="omit embedded plot data from the report JSON")
    p.add_argument("--log-scale", action="store_true", help="log-scaled scatter axes")
    _add_threads_flag(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("plot", help="render SVGs from a report's embedded plot data")
    p.add_argument("--report", required=True, help="report JSON from evaluate")
    p.add_argument("--out-dir", required=True, help="directory for SVG files")
    p.add_argument("--log-scale", action="store_true", help="log-scaled scatter axes")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("validate", help="check data against domain rules")
    p.add_argument("--data", required=True, help="CSV to validate")
    p.add_argument("--schema", required=True, help="schema JSON")
    p.add_argument("--rules", required=True,
                   help=f"rule file JSON (shipped example: {shipped_rules_path()})")
    p.add_argument("--fit-ranges-from", help="real CSV for fitting range-rule bounds")
    p.add_argument("--out", required=True, help="violation report JSON path")
    p.add_argument("--csv", help="violation report CSV path (default: --out with .csv)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tune", help="optimize an external synthesizer command")
    p.add_argument("--space", required=True, help="search-space JSON")
    p.add_argument("--study", help="study config JSON (budget, timeouts, seed, objectives)")
    p.add_argument("--command", required=True,
                   help="synthesizer command prefix, e.g. 'synthqa refsynth'")
    p.add_argument("--real", required=True, help="real data CSV")
    p.add_argument("--schema", required=True, help="schema JSON")
    p.add_argument("--workdir", required=True, help="directory for trial artifacts")
    p.add_argument("--journal", help="trial journal path (default: <workdir>/journal.jsonl)")
    p.add_argument("--budget", type=int, help="completed-trial budget")
    p.add_argument("--train-timeout", type=float, help="per-trial train timeout (seconds)")
    p.add_argument("--synth-timeout", type=float, help="per-trial synth timeout (seconds)")
    p.add_argument("--seed", type=int, default=None, help="optimizer seed")
    p.add_argument("--n-synth", type=int, default=1000,
                   help="rows to request per trial (default 1000)")
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), default="point-mean")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("rank", help="rank models from report JSONs")
    p.add_argument("--reports", nargs="+", required=True,
                   help="report JSON paths or globs")
    p.add_argument("--out", help="ranking CSV path")
    p.add_argument("--json", help="ranking JSON path")
    p.add_argument("--compare", help="comma-separated metrics for rank agreement")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("refsynth", help="reference samplers (also a tuning target)")
    p.add_argument("phase", choices=["sample", "train", "synth"])
    p.add_argument("--real", help="real data CSV (sample/train)")
    p.add_argument("--schema", help="schema JSON (sample/train)")
    p.add_argument("--method", choices=["independent", "bootstrap", "mode"],
                   default="independent")
    p.add_argument("--n", type=int, help="rows to generate (sample/synth)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt", type=float, default=0.0,
                   help="fraction of cells replaced by uniform noise")
    p.add_argument("--out", help="output CSV (sample/synth)")
    p.add_argument("--params", help="params JSON file (train)")
    p.add_argument("--workdir", help="model directory (train/synth)")
    p.set_defaults(func=cmd_refsynth)

    return parser


def _check_refsynth_args(args) -> None:
    needed = {
        "sample": ["real", "schema", "n", "out"],
        "train": ["real", "schema", "params", "workdir"],
        "synth": ["workdir", "n", "out"],
    }[args.phase]
    missing = [f"--{n.replace('_', '-')}" for n in needed if getattr(args, n) is None]
    if missing:
        raise SynthqaError(f"refsynth {args.phase} requires {', '.join(missing)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.func is cmd_refsynth:
            _check_refsynth_args(args)
        return args.func(args)
    except (SynthqaError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"synthqa: error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        print("synthqa: internal error", file=sys.stderr)
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
