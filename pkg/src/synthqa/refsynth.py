"""Reference samplers: cheap baseline generators for tests and dry runs.

Three behaviors bracket the metric space: independent sampling preserves
1-way marginals but destroys correlations, bootstrap preserves everything,
and mode collapse maximizes marginal mass concentration. None of them is a
real synthesizer; they exist so the pipeline can be exercised hermetically.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .schema import CATEGORICAL
from .table import CategoricalColumn, Column, NumericColumn, TableData


def independent_sample(real: TableData, n: int, seed: int = 0) -> TableData:
    """Sample each column i.i.d. from its own empirical distribution.

    Categorical cells draw codes by empirical probability («missing» is an
    ordinary level); numeric cells bootstrap (value, missing-flag) pairs, so
    the missing rate is preserved in expectation.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    cols: list[Column] = []
    for spec, col in zip(real.schema.columns, real.columns):
        idx = rng.integers(0, real.n_rows, size=n)
        if spec.kind == CATEGORICAL:
            cols.append(CategoricalColumn(spec.name, col.codes[idx], col.levels))
        else:
            cols.append(NumericColumn(spec.name, col.values[idx], col.missing[idx]))
    return TableData(real.schema, cols)


def bootstrap_sample(real: TableData, n: int, seed: int = 0) -> TableData:
    """Draw whole rows uniformly with replacement."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, real.n_rows, size=n)
    cols: list[Column] = []
    for spec, col in zip(real.schema.columns, real.columns):
        if spec.kind == CATEGORICAL:
            cols.append(CategoricalColumn(spec.name, col.codes[idx], col.levels))
        else:
            cols.append(NumericColumn(spec.name, col.values[idx], col.missing[idx]))
    return TableData(real.schema, cols)


def mode_collapse_sample(real: TableData, n: int) -> TableData:
    """Every row repeats the per-column most frequent value.

    Ties pick the lexicographically smallest level (smallest value for
    numeric columns). Column-wise modes need not co-occur in any real row,
    so the output can be entirely invented at degree 2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cols: list[Column] = []
    for spec, col in zip(real.schema.columns, real.columns):
        if spec.kind == CATEGORICAL:
            counts = np.bincount(col.codes, minlength=len(col.levels))
            # levels are sorted, so the first argmax is the lexicographic tie-break
            best = int(np.argmax(counts))
            cols.append(
                CategoricalColumn(spec.name, np.full(n, best, dtype=np.int64), col.levels)
            )
        else:
            present = col.present()
            if present.size == 0:
                cols.append(
                    NumericColumn(spec.name, np.zeros(n), np.ones(n, dtype=bool))
                )
                continue
            values, counts = np.unique(present, return_counts=True)
            mode = float(values[np.argmax(counts)])  # unique sorts, first max is smallest
            cols.append(
                NumericColumn(spec.name, np.full(n, mode), np.zeros(n, dtype=bool))
            )
    return TableData(real.schema, cols)


def corrupt_cells(
    table: TableData, real: TableData, rate: float, seed: int = 0
) -> TableData:
    """Replace a fraction of cells with uniform noise over the real domain.

    A fidelity knob for tuning demos: higher rate means worse marginals.
    Categorical cells are resampled uniformly over the real dictionary;
    numeric cells uniformly over the real [min, max]. Missing flags persist.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    if rate == 0.0:
        return table
    rng = np.random.default_rng(seed)
    data: dict[str, list] = {}
    n = table.n_rows
    for spec, col, real_col in zip(table.schema.columns, table.columns, real.columns):
        hit = rng.random(n) < rate
        if spec.kind == CATEGORICAL:
            # noise codes index the REAL dictionary, which may differ from the
            # table's; go through level strings and re-encode
            noise = rng.integers(0, len(real_col.levels), size=n)
            own = np.array(col.decode(), dtype=object)
            drawn = np.array([real_col.levels[c] for c in noise], dtype=object)
            data[spec.name] = np.where(hit, drawn, own).tolist()
        else:
            present = real_col.present()
            lo = float(present.min()) if present.size else 0.0
            hi = float(present.max()) if present.size else 1.0
            noise = rng.uniform(lo, hi, size=n)
            values = np.where(hit & ~col.missing, noise, col.values)
            data[spec.name] = [
                None if m else float(v) for v, m in zip(values, col.missing)
            ]
    return TableData.from_columns(table.schema, data)


class _FittedSampler(BaseEstimator):
    """Common fit/sample plumbing for the reference samplers."""

    def fit(self, real: TableData, y=None):
        self.real_ = real
        return self

    def _fitted_real(self) -> TableData:
        real = getattr(self, "real_", None)
        if real is None:
            raise NotFittedError(
                f"{type(self).__name__} is not fitted yet; call fit(real) first"
            )
        return real


class IndependentSampler(_FittedSampler):
    """Per-column i.i.d. sampler preserving 1-way marginals only."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def sample(self, n: int) -> TableData:
        return independent_sample(self._fitted_real(), n, self.seed)


class BootstrapSampler(_FittedSampler):
    """Row resampler; the strongest honest baseline."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def sample(self, n: int) -> TableData:
        return bootstrap_sample(self._fitted_real(), n, self.seed)


class ModeCollapseSampler(_FittedSampler):
    """Degenerate sampler emitting only per-column modes."""

    def sample(self, n: int) -> TableData:
        return mode_collapse_sample(self._fitted_real(), n)


SAMPLER_METHODS = ("independent", "bootstrap", "mode")


def sample_by_method(real: TableData, method: str, n: int, seed: int = 0) -> TableData:
    if method == "independent":
        return independent_sample(real, n, seed)
    if method == "bootstrap":
        return bootstrap_sample(real, n, seed)
    if method == "mode":
        return mode_collapse_sample(real, n)
    raise ValueError(f"unknown refsynth method {method!r}")
