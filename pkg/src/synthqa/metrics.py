"""Fidelity metrics over marginal tables.

Degree-1 and degree-2 marginals drive everything: MAE and coverage/invented
for categorical tuples, histogram IoU for binned numeric tuples, plus JSD and
per-variable Wasserstein distances as secondary checks. All float reductions
go through math.fsum so results do not depend on summation order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyColumn,
    EmptyList,
    EmptySynth,
    EmptyTable,
    NoRealSupport,
)
from .marginals import MarginalTable, VariableTuple, count_marginal, enumerate_tuples
from .schema import CATEGORICAL, NUMERICAL, Schema, ensure_same_schema
from .table import (
    AlignedPair,
    CategoricalColumn,
    MergedLevels,
    TableData,
    align_dictionaries,
)

POINT_MEAN = "point-mean"
VARIABLE_L1 = "variable-L1"
MODES = (POINT_MEAN, VARIABLE_L1)

DEFAULT_BINS = 10


def mae(table: MarginalTable, mode: str = POINT_MEAN) -> float:
    """Marginal error for one tuple.

    point-mean: mean |p_real - p_synth| over union-support cells.
    variable-L1: the plain L1 sum, i.e. twice the total variation distance.
    """
    if mode not in MODES:
        raise ValueError(f"unknown normalization mode {mode!r}")
    if table.n_cells == 0:
        raise EmptyTable(f"tuple {table.names}: no cells")
    diffs = np.abs(table.p_real() - table.p_synth())
    total = math.fsum(diffs)
    return total / table.n_cells if mode == POINT_MEAN else total


def mae_k(tables: list[MarginalTable], mode: str = POINT_MEAN) -> float:
    """Unweighted mean of per-tuple mae."""
    if not tables:
        raise EmptyList("no marginal tables")
    return math.fsum(mae(t, mode) for t in tables) / len(tables)


def coverage(table: MarginalTable) -> float:
    """Fraction of real-supported cells generated at least once."""
    real_supported = table.count_real > 0
    n_real_cells = int(np.count_nonzero(real_supported))
    if n_real_cells == 0:
        raise NoRealSupport(f"tuple {table.names}: real side has no counted rows")
    covered = int(np.count_nonzero(real_supported & (table.count_synth > 0)))
    return covered / n_real_cells


def invented(table: MarginalTable) -> float:
    """Fraction of synthetic samples whose cell never occurs in real."""
    if table.n_synth == 0:
        raise EmptySynth(f"tuple {table.names}: synth side has no counted rows")
    mass = int(table.count_synth[table.count_real == 0].sum())
    return mass / table.n_synth


def hist_iou(table: MarginalTable) -> float:
    """Sum of cell-wise minima over sum of cell-wise maxima."""
    if table.n_cells == 0:
        raise EmptyTable(f"tuple {table.names}: no cells")
    p = table.p_real()
    q = table.p_synth()
    inter = math.fsum(np.minimum(p, q))
    union = math.fsum(np.maximum(p, q))
    return inter / union


def jsd(table: MarginalTable) -> float:
    """Jensen-Shannon distance, log base 2, over union support. In [0, 1]."""
    if table.n_cells == 0:
        raise EmptyTable(f"tuple {table.names}: no cells")
    p = table.p_real()
    q = table.p_synth()
    m = 0.5 * (p + q)
    terms = []
    for dist in (p, q):
        nz = dist > 0
        terms.extend(dist[nz] * np.log2(dist[nz] / m[nz]))
    divergence = 0.5 * math.fsum(terms)
    return math.sqrt(min(max(divergence, 0.0), 1.0))


def wasserstein1d(real_values, synth_values) -> float:
    """1-D earth mover's distance between two samples.

    Sorted samples are matched index-to-index; when sizes differ, the larger
    side is reduced to the smaller size by linear-interpolation quantiles at
    ranks i/(m-1) (the single-point case takes the median).
    """
    r = np.sort(np.asarray(real_values, dtype=np.float64))
    s = np.sort(np.asarray(synth_values, dtype=np.float64))
    if r.size == 0 or s.size == 0:
        raise EmptyColumn("wasserstein1d needs nonempty samples on both sides")
    m = min(r.size, s.size)
    ranks = np.linspace(0.0, 1.0, m) if m > 1 else np.array([0.5])
    if r.size > m:
        r = np.quantile(r, ranks, method="linear")
    elif s.size > m:
        s = np.quantile(s, ranks, method="linear")
    return math.fsum(np.abs(r - s)) / m


def quantiles(values, n_points: int) -> np.ndarray:
    """n_points quantiles at ranks i/(n_points-1), linearly interpolated."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise EmptyColumn("quantiles of an empty sample")
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    ranks = np.linspace(0.0, 1.0, n_points)
    return np.quantile(v, ranks, method="linear")


@dataclass(frozen=True)
class ColumnBins:
    """Equal-width bin layout for one numeric column, bounds from real data."""

    name: str
    lower: float
    upper: float
    n_bins: int

    @property
    def degenerate(self) -> bool:
        return self.lower == self.upper

    def edges(self) -> np.ndarray:
        if self.degenerate:
            return np.array([self.lower, self.upper])
        return np.linspace(self.lower, self.upper, self.n_bins + 1)

    def labels(self) -> tuple[str, ...]:
        if self.degenerate:
            return (f"[{self.lower:.6g}, {self.upper:.6g}]",)
        e = self.edges()
        out = [f"[{e[i]:.6g}, {e[i + 1]:.6g})" for i in range(self.n_bins - 1)]
        out.append(f"[{e[self.n_bins - 1]:.6g}, {e[self.n_bins]:.6g}]")
        return tuple(out)

    def assign(self, values: np.ndarray) -> np.ndarray:
        """Bin index per value; out-of-range values clamp to the edge bins."""
        if self.degenerate:
            return np.zeros(values.shape, dtype=np.int64)
        width = (self.upper - self.lower) / self.n_bins
        idx = np.floor((values - self.lower) / width).astype(np.int64)
        return np.clip(idx, 0, self.n_bins - 1)


@dataclass(frozen=True)
class BinSpec:
    columns: tuple[ColumnBins, ...]

    def for_column(self, name: str) -> ColumnBins:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @classmethod
    def from_real(cls, real: TableData, n_bins: int = DEFAULT_BINS) -> "BinSpec":
        if n_bins < 1:
            raise ValueError("n_bins must be >= 1")
        cols = []
        for name in real.schema.names_of_kind(NUMERICAL):
            present = real.numeric(name).present()
            if present.size == 0:
                cols.append(ColumnBins(name, 0.0, 0.0, 1))
                continue
            lo = float(present.min())
            hi = float(present.max())
            cols.append(ColumnBins(name, lo, hi, 1 if lo == hi else n_bins))
        return cls(tuple(cols))


def bin_numeric(pair: AlignedPair, spec: BinSpec) -> AlignedPair:
    """Replace numeric columns by categorical bin-index columns.

    Bin bounds come from the BinSpec (built from real data); synthetic values
    outside the real range land in the first/last bin. Missing cells carry an
    exclusion mask so they stay out of marginal counts.
    """
    overrides = {c.name: CATEGORICAL for c in spec.columns}
    new_schema = pair.schema.with_kinds(overrides)

    def convert(table: TableData) -> TableData:
        cols = []
        for spec_col, col in zip(pair.schema.columns, table.columns):
            if spec_col.kind == CATEGORICAL:
                cols.append(col)
                continue
            bins = spec.for_column(spec_col.name)
            codes = bins.assign(col.values)
            excluded = col.missing.copy() if col.missing.any() else None
            if excluded is not None:
                codes = np.where(excluded, 0, codes)
            cols.append(
                CategoricalColumn(spec_col.name, codes, bins.labels(), excluded)
            )
        return TableData(new_schema, cols)

    real_b = convert(pair.real)
    synth_b = convert(pair.synth)

    merged = dict(pair.merged)
    for c in spec.columns:
        n_levels = len(c.labels())
        r_seen = np.zeros(n_levels, dtype=bool)
        s_seen = np.zeros(n_levels, dtype=bool)
        r_codes = real_b.categorical(c.name).counted_codes()
        s_codes = synth_b.categorical(c.name).counted_codes()
        if r_codes.size:
            r_seen[np.unique(r_codes)] = True
        if s_codes.size:
            s_seen[np.unique(s_codes)] = True
        merged[c.name] = MergedLevels(c.name, c.labels(), r_seen, s_seen)

    return AlignedPair(new_schema, real_b, synth_b, merged)


@dataclass
class QualityReport:
    """Aggregated fidelity metrics for one (real, synth) pair.

    mae1/mae2 follow normalization_mode; the *_point_mean / *_variable_l1
    variants carry both normalizations regardless. Fields are None when the
    schema lacks enough columns of the relevant kind (e.g. hist_iou2 with
    fewer than two numeric columns).
    """

    dataset_id: str
    model_id: str
    normalization_mode: str
    n_real: int
    n_synth: int
    n_bins: int
    mae1: float | None
    mae2: float | None
    coverage1: float | None
    coverage2: float | None
    invented1: float | None
    invented2: float | None
    hist_iou1: float | None
    hist_iou2: float | None
    jsd2: float | None
    wd1: dict[str, float | None]
    wd1_mean: float | None
    mae1_point_mean: float | None
    mae1_variable_l1: float | None
    mae2_point_mean: float | None
    mae2_variable_l1: float | None
    numeric_missing_rates: dict[str, float]
    detail: list[dict]
    plots: dict | None = None

    def metric(self, name: str) -> float | None:
        """Look up an aggregate metric by report-field name."""
        if name not in _METRIC_FIELDS:
            raise KeyError(f"unknown metric {name!r}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        doc = {
            "dataset_id": self.dataset_id,
            "model_id": self.model_id,
            "normalization_mode": self.normalization_mode,
            "n_real": self.n_real,
            "n_synth": self.n_synth,
            "n_bins": self.n_bins,
            "metrics": {
                "mae1": self.mae1,
                "mae2": self.mae2,
                "coverage1": self.coverage1,
                "coverage2": self.coverage2,
                "invented1": self.invented1,
                "invented2": self.invented2,
                "hist_iou1": self.hist_iou1,
                "hist_iou2": self.hist_iou2,
                "jsd2": self.jsd2,
                "wd1_mean": self.wd1_mean,
                "mae1_point_mean": self.mae1_point_mean,
                "mae1_variable_l1": self.mae1_variable_l1,
                "mae2_point_mean": self.mae2_point_mean,
                "mae2_variable_l1": self.mae2_variable_l1,
            },
            "wd1": dict(self.wd1),
            "numeric_missing_rates": dict(self.numeric_missing_rates),
            "detail": self.detail,
        }
        if self.plots is not None:
            doc["plots"] = self.plots
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "QualityReport":
        m = doc["metrics"]
        return cls(
            dataset_id=doc["dataset_id"],
            model_id=doc["model_id"],
            normalization_mode=doc["normalization_mode"],
            n_real=doc["n_real"],
            n_synth=doc["n_synth"],
            n_bins=doc["n_bins"],
            mae1=m["mae1"],
            mae2=m["mae2"],
            coverage1=m["coverage1"],
            coverage2=m["coverage2"],
            invented1=m["invented1"],
            invented2=m["invented2"],
            hist_iou1=m["hist_iou1"],
            hist_iou2=m["hist_iou2"],
            jsd2=m["jsd2"],
            wd1=dict(doc.get("wd1", {})),
            wd1_mean=m["wd1_mean"],
            mae1_point_mean=m["mae1_point_mean"],
            mae1_variable_l1=m["mae1_variable_l1"],
            mae2_point_mean=m["mae2_point_mean"],
            mae2_variable_l1=m["mae2_variable_l1"],
            numeric_missing_rates=dict(doc.get("numeric_missing_rates", {})),
            detail=list(doc.get("detail", [])),
            plots=doc.get("plots"),
        )


_METRIC_FIELDS = (
    "mae1", "mae2", "coverage1", "coverage2", "invented1", "invented2",
    "hist_iou1", "hist_iou2", "jsd2", "wd1_mean",
    "mae1_point_mean", "mae1_variable_l1", "mae2_point_mean", "mae2_variable_l1",
)


@dataclass
class EvaluationResult:
    """QualityReport plus the marginal tables it was computed from."""

    report: QualityReport
    cat_tables: dict[int, list[MarginalTable]] = field(default_factory=dict)
    num_tables: dict[int, list[MarginalTable]] = field(default_factory=dict)


def _mean_or_none(values: list[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


def _tuple_names(schema: Schema, t: VariableTuple) -> list[str]:
    return [schema.columns[i].name for i in t]


def evaluate_full(
    real: TableData,
    synth: TableData,
    mode: str = POINT_MEAN,
    n_bins: int = DEFAULT_BINS,
    dataset_id: str = "",
    model_id: str = "",
    threads: int = 1,
) -> EvaluationResult:
    """Compute all degree-1/degree-2 metrics and keep the marginal tables."""
    if mode not in MODES:
        raise ValueError(f"unknown normalization mode {mode!r}")
    ensure_same_schema(real.schema, synth.schema)
    if real.n_rows == 0:
        raise EmptyTable("real table has no rows")
    if synth.n_rows == 0:
        raise EmptySynth("synthetic table has no rows")

    schema = real.schema
    pair = align_dictionaries(real, synth)
    has_numeric = bool(schema.names_of_kind(NUMERICAL))
    binned = bin_numeric(pair, BinSpec.from_real(real, n_bins)) if has_numeric else None

    jobs: list[tuple[str, int, VariableTuple]] = []
    for k in (1, 2):
        jobs.extend((CATEGORICAL, k, t) for t in enumerate_tuples(schema, k, CATEGORICAL))
    for k in (1, 2):
        jobs.extend((NUMERICAL, k, t) for t in enumerate_tuples(schema, k, NUMERICAL))

    def count_one(job: tuple[str, int, VariableTuple]) -> MarginalTable:
        kind, _, t = job
        return count_marginal(pair if kind == CATEGORICAL else binned, t)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tables = list(pool.map(count_one, jobs))
    else:
        tables = [count_one(j) for j in jobs]

    cat_tables: dict[int, list[MarginalTable]] = {1: [], 2: []}
    num_tables: dict[int, list[MarginalTable]] = {1: [], 2: []}
    detail: list[dict] = []
    agg: dict[tuple[str, int, str], list[float]] = {}

    def push(kind: str, k: int, metric_name: str, value: float | None):
        if value is not None:
            agg.setdefault((kind, k, metric_name), []).append(value)

    for (kind, k, t), table in zip(jobs, tables):
        entry: dict = {
            "columns": _tuple_names(schema, t),
            "kind": kind,
            "k": k,
            "n_cells": table.n_cells,
        }
        if table.n_cells == 0:
            # every row had a missing cell in this tuple on both sides
            entry.update(
                mae_point_mean=None, mae_variable_l1=None, coverage=None,
                invented=None,
            )
            if kind == NUMERICAL:
                entry["hist_iou"] = None
            else:
                entry["jsd"] = None
            detail.append(entry)
            (cat_tables if kind == CATEGORICAL else num_tables)[k].append(table)
            continue

        m_pm = mae(table, POINT_MEAN)
        m_l1 = mae(table, VARIABLE_L1)
        cov = coverage(table) if table.n_real else None
        inv = invented(table) if table.n_synth else None
        entry["mae_point_mean"] = m_pm
        entry["mae_variable_l1"] = m_l1
        entry["coverage"] = cov
        entry["invented"] = inv
        if kind == CATEGORICAL:
            entry["jsd"] = jsd(table)
            push(kind, k, "mae_point_mean", m_pm)
            push(kind, k, "mae_variable_l1", m_l1)
            push(kind, k, "coverage", cov)
            push(kind, k, "invented", inv)
            push(kind, k, "jsd", entry["jsd"])
            cat_tables[k].append(table)
        else:
            entry["hist_iou"] = hist_iou(table)
            push(kind, k, "hist_iou", entry["hist_iou"])
            num_tables[k].append(table)
        detail.append(entry)

    wd1: dict[str, float | None] = {}
    missing_rates: dict[str, float] = {}
    for name in schema.names_of_kind(NUMERICAL):
        r_col = real.numeric(name)
        s_col = synth.numeric(name)
        missing_rates[name] = r_col.missing_count() / real.n_rows
        r_vals = r_col.present()
        s_vals = s_col.present()
        wd1[name] = (
            wasserstein1d(r_vals, s_vals) if r_vals.size and s_vals.size else None
        )
        # wasserstein on a k=1 numeric detail entry, for completeness
        for entry in detail:
            if entry["kind"] == NUMERICAL and entry["k"] == 1 and entry["columns"] == [name]:
                entry["wd"] = wd1[name]
    wd_values = [v for v in wd1.values() if v is not None]

    def aggregate(kind: str, k: int, metric_name: str) -> float | None:
        return _mean_or_none(agg.get((kind, k, metric_name), []))

    mae1_pm = aggregate(CATEGORICAL, 1, "mae_point_mean")
    mae1_l1 = aggregate(CATEGORICAL, 1, "mae_variable_l1")
    mae2_pm = aggregate(CATEGORICAL, 2, "mae_point_mean")
    mae2_l1 = aggregate(CATEGORICAL, 2, "mae_variable_l1")

    report = QualityReport(
        dataset_id=dataset_id,
        model_id=model_id,
        normalization_mode=mode,
        n_real=real.n_rows,
        n_synth=synth.n_rows,
        n_bins=n_bins,
        mae1=mae1_pm if mode == POINT_MEAN else mae1_l1,
        mae2=mae2_pm if mode == POINT_MEAN else mae2_l1,
        coverage1=aggregate(CATEGORICAL, 1, "coverage"),
        coverage2=aggregate(CATEGORICAL, 2, "coverage"),
        invented1=aggregate(CATEGORICAL, 1, "invented"),
        invented2=aggregate(CATEGORICAL, 2, "invented"),
        hist_iou1=aggregate(NUMERICAL, 1, "hist_iou"),
        hist_iou2=aggregate(NUMERICAL, 2, "hist_iou"),
        jsd2=aggregate(CATEGORICAL, 2, "jsd"),
        wd1=wd1,
        wd1_mean=_mean_or_none(wd_values),
        mae1_point_mean=mae1_pm,
        mae1_variable_l1=mae1_l1,
        mae2_point_mean=mae2_pm,
        mae2_variable_l1=mae2_l1,
        numeric_missing_rates=missing_rates,
        detail=detail,
    )
    return EvaluationResult(report, cat_tables, num_tables)


def evaluate(
    real: TableData,
    synth: TableData,
    mode: str = POINT_MEAN,
    n_bins: int = DEFAULT_BINS,
    dataset_id: str = "",
    model_id: str = "",
    threads: int = 1,
) -> QualityReport:
    """Full fidelity report for a (real, synth) pair; see evaluate_full."""
    return evaluate_full(
        real, synth, mode=mode, n_bins=n_bins,
        dataset_id=dataset_id, model_id=model_id, threads=threads,
    ).report
