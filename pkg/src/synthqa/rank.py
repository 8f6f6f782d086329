"""Model ranking, HPO-improvement deltas, and cross-metric rank agreement."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import kendalltau

from .errors import EmptyList, MixedDatasets, ModelSetMismatch
from .metrics import QualityReport
from .pareto import MAXIMIZE, MINIMIZE, pareto_front_indices

# direction per rankable aggregate: lower-is-better unless stated
METRIC_DIRECTIONS = {
    "mae1": MINIMIZE,
    "mae2": MINIMIZE,
    "mae1_point_mean": MINIMIZE,
    "mae1_variable_l1": MINIMIZE,
    "mae2_point_mean": MINIMIZE,
    "mae2_variable_l1": MINIMIZE,
    "coverage1": MAXIMIZE,
    "coverage2": MAXIMIZE,
    "invented1": MINIMIZE,
    "invented2": MINIMIZE,
    "hist_iou1": MAXIMIZE,
    "hist_iou2": MAXIMIZE,
    "jsd2": MINIMIZE,
    "wd1_mean": MINIMIZE,
}

_TABLE_COLUMNS = (
    "mae1", "mae2", "coverage1", "coverage2", "invented1", "invented2",
    "hist_iou1", "hist_iou2", "jsd2", "wd1_mean",
)


@dataclass(frozen=True)
class RankRow:
    rank: int
    model_id: str
    metrics: dict[str, float | None]
    pareto: bool | None          # mixed datasets only
    best_in: tuple[str, ...]     # metric columns where this model is best

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "model_id": self.model_id,
            "metrics": dict(self.metrics),
            "pareto": self.pareto,
            "best_in": list(self.best_in),
        }


@dataclass(frozen=True)
class RankTable:
    dataset_id: str
    sort_metric: str
    rows: tuple[RankRow, ...]

    @property
    def order(self) -> list[str]:
        return [r.model_id for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "sort_metric": self.sort_metric,
            "rows": [r.to_dict() for r in self.rows],
        }

    def write_csv(self, path: str | Path) -> None:
        has_pareto = any(r.pareto is not None for r in self.rows)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = ["dataset", "rank", "model"] + list(_TABLE_COLUMNS)
            if has_pareto:
                header.append("pareto_front")
            header.append("best_in")
            writer.writerow(header)
            for r in self.rows:
                row = [self.dataset_id, r.rank, r.model_id]
                for m in _TABLE_COLUMNS:
                    v = r.metrics.get(m)
                    row.append("" if v is None else repr(float(v)))
                if has_pareto:
                    row.append("yes" if r.pareto else "no")
                row.append("|".join(r.best_in))
                writer.writerow(row)


def _pick_sort_metric(reports: list[QualityReport]) -> str:
    has_cat = all(r.mae2 is not None for r in reports)
    has_num = all(r.hist_iou2 is not None for r in reports)
    if has_cat:
        return "mae2"  # mixed datasets also sort by mae2, with Pareto annotation
    if has_num:
        return "hist_iou2"
    if all(r.mae1 is not None for r in reports):
        return "mae1"
    if all(r.hist_iou1 is not None for r in reports):
        return "hist_iou1"
    raise EmptyList("reports carry no rankable metric")


def rank_models(reports: list[QualityReport]) -> RankTable:
    """Order models of one dataset by the primary fidelity metric.

    Categorical data sorts ascending by mae2, numerical descending by
    hist_iou2; mixed data sorts by mae2 and annotates membership in the
    (mae2 down, hist_iou2 up) Pareto front instead of blending scores.
    Ties fall back to model_id, and the best value per metric column is
    flagged on every model achieving it.
    """
    if not reports:
        raise EmptyList("no reports to rank")
    dataset_ids = {r.dataset_id for r in reports}
    if len(dataset_ids) != 1:
        raise MixedDatasets(f"reports span datasets {sorted(dataset_ids)}")

    sort_metric = _pick_sort_metric(reports)
    direction = METRIC_DIRECTIONS[sort_metric]
    sign = 1.0 if direction == MINIMIZE else -1.0
    ordered = sorted(
        reports, key=lambda r: (sign * r.metric(sort_metric), r.model_id)
    )

    mixed = sort_metric == "mae2" and all(r.hist_iou2 is not None for r in reports)
    pareto_members: set[str] = set()
    if mixed:
        objs = np.array([(r.mae2, r.hist_iou2) for r in ordered])
        front = pareto_front_indices(objs, (MINIMIZE, MAXIMIZE))
        pareto_members = {ordered[i].model_id for i in front}

    best_by_metric: dict[str, set[str]] = {}
    for m in _TABLE_COLUMNS:
        values = [(r.model_id, r.metric(m)) for r in ordered if r.metric(m) is not None]
        if not values:
            continue
        msign = 1.0 if METRIC_DIRECTIONS[m] == MINIMIZE else -1.0
        target = min(msign * v for _, v in values)
        best_by_metric[m] = {mid for mid, v in values if msign * v == target}

    rows = []
    for i, r in enumerate(ordered):
        flags = tuple(m for m in _TABLE_COLUMNS if r.model_id in best_by_metric.get(m, ()))
        rows.append(
            RankRow(
                rank=i + 1,
                model_id=r.model_id,
                metrics={m: r.metric(m) for m in _TABLE_COLUMNS},
                pareto=(r.model_id in pareto_members) if mixed else None,
                best_in=flags,
            )
        )
    return RankTable(reports[0].dataset_id, sort_metric, tuple(rows))


@dataclass(frozen=True)
class Improvement:
    dataset_id: str
    model_id: str
    metric: str
    default_value: float
    hpo_value: float
    delta: float
    pct: float | None          # None when the baseline is zero
    zero_baseline: bool

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "model_id": self.model_id,
            "metric": self.metric,
            "default": self.default_value,
            "hpo": self.hpo_value,
            "delta": self.delta,
            "pct": self.pct,
            "zero_baseline": self.zero_baseline,
        }


def _auto_metric(a: QualityReport, b: QualityReport) -> str:
    for m in ("mae2", "hist_iou2", "mae1", "hist_iou1"):
        if a.metric(m) is not None and b.metric(m) is not None:
            return m
    raise ValueError("no metric defined in both reports")


def improvement(
    default_report: QualityReport,
    hpo_report: QualityReport,
    metric: str | None = None,
) -> Improvement:
    """delta and relative change of a metric after tuning.

    pct keeps the sign of delta and is computed against the default value; a
    zero baseline yields pct None with the zero_baseline flag set instead of
    dividing by zero.
    """
    if default_report.dataset_id != hpo_report.dataset_id:
        raise MixedDatasets(
            f"reports compare different datasets: "
            f"{default_report.dataset_id!r} vs {hpo_report.dataset_id!r}"
        )
    if default_report.model_id != hpo_report.model_id:
        raise ValueError(
            f"reports compare different models: "
            f"{default_report.model_id!r} vs {hpo_report.model_id!r}"
        )
    if metric is None:
        metric = _auto_metric(default_report, hpo_report)
    base = default_report.metric(metric)
    tuned = hpo_report.metric(metric)
    if base is None or tuned is None:
        raise ValueError(f"metric {metric!r} not defined in both reports")
    delta = tuned - base
    zero = base == 0.0
    return Improvement(
        dataset_id=default_report.dataset_id,
        model_id=default_report.model_id,
        metric=metric,
        default_value=base,
        hpo_value=tuned,
        delta=delta,
        pct=None if zero else delta / base,
        zero_baseline=zero,
    )


def write_improvements_csv(improvements: list[Improvement], path: str | Path) -> None:
    """Table-5-style layout: one row per (dataset, model) with delta and pct."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dataset", "model", "metric", "default", "hpo", "delta", "pct"])
        for imp in improvements:
            writer.writerow([
                imp.dataset_id, imp.model_id, imp.metric,
                repr(imp.default_value), repr(imp.hpo_value), repr(imp.delta),
                "" if imp.pct is None else f"{100.0 * imp.pct:.0f}%",
            ])


@dataclass(frozen=True)
class RankComparison:
    metrics: tuple[str, ...]
    order_table: dict[str, tuple[str, ...]]     # metric -> model order
    taus: dict[str, dict[str, float]]           # metric x metric -> Kendall tau

    def to_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "orders": {m: list(o) for m, o in self.order_table.items()},
            "kendall_tau": {a: dict(row) for a, row in self.taus.items()},
        }

    def write_csv(self, path: str | Path) -> None:
        """Side-by-side orders, then the pairwise tau matrix."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["position"] + list(self.metrics))
            n_models = len(next(iter(self.order_table.values())))
            for i in range(n_models):
                writer.writerow([i + 1] + [self.order_table[m][i] for m in self.metrics])
            writer.writerow([])
            writer.writerow(["kendall_tau"] + list(self.metrics))
            for a in self.metrics:
                writer.writerow([a] + [repr(self.taus[a][b]) for b in self.metrics])


def compare_rankings(rankings: dict[str, list[str]]) -> RankComparison:
    """Kendall-tau agreement between model orders produced by different metrics."""
    if not rankings:
        raise EmptyList("no rankings to compare")
    metrics = tuple(rankings.keys())
    model_sets = {m: frozenset(order) for m, order in rankings.items()}
    reference = model_sets[metrics[0]]
    for m, s in model_sets.items():
        if s != reference:
            raise ModelSetMismatch(
                f"ranking {m!r} covers {sorted(s)}, expected {sorted(reference)}"
            )
        if len(rankings[m]) != len(s):
            raise ModelSetMismatch(f"ranking {m!r} contains duplicate models")

    models = sorted(reference)
    positions = {
        m: np.array([rankings[m].index(mod) for mod in models]) for m in metrics
    }
    taus: dict[str, dict[str, float]] = {}
    for a in metrics:
        taus[a] = {}
        for b in metrics:
            if len(models) < 2:
                taus[a][b] = 1.0
                continue
            tau = kendalltau(positions[a], positions[b]).statistic
            taus[a][b] = float(tau)
    return RankComparison(
        metrics,
        {m: tuple(rankings[m]) for m in metrics},
        taus,
    )
