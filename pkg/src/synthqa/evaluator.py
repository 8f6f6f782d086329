"""Estimator-style wrappers around the functional metric and rule APIs.

Fitting pins the real dataset (and fits data-driven rule bounds); evaluation
and checking then run against that reference. Parameters follow scikit-learn
conventions, so get_params/set_params and clone work as usual.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .domain import RuleSet, ViolationReport, check, fit_rules
from .metrics import (
    DEFAULT_BINS,
    POINT_MEAN,
    EvaluationResult,
    QualityReport,
    evaluate_full,
)
from .table import TableData


class FidelityEvaluator(BaseEstimator):
    """Computes QualityReports for synthetic candidates against one real table."""

    def __init__(self, mode: str = POINT_MEAN, n_bins: int = DEFAULT_BINS,
                 threads: int = 1):
        self.mode = mode
        self.n_bins = n_bins
        self.threads = threads

    def fit(self, real: TableData, y=None) -> "FidelityEvaluator":
        self.real_ = real
        return self

    def _require_fit(self) -> TableData:
        real = getattr(self, "real_", None)
        if real is None:
            raise NotFittedError("FidelityEvaluator is not fitted; call fit(real) first")
        return real

    def evaluate_full(self, synth: TableData, dataset_id: str = "",
                      model_id: str = "") -> EvaluationResult:
        return evaluate_full(
            self._require_fit(), synth,
            mode=self.mode, n_bins=self.n_bins,
            dataset_id=dataset_id, model_id=model_id, threads=self.threads,
        )

    def evaluate(self, synth: TableData, dataset_id: str = "",
                 model_id: str = "") -> QualityReport:
        return self.evaluate_full(synth, dataset_id, model_id).report


class DomainValidator(BaseEstimator):
    """Checks tables against a rule set whose ranges are fitted on real data."""

    def __init__(self, rules: RuleSet):
        self.rules = rules

    def fit(self, real: TableData, y=None) -> "DomainValidator":
        self.rules_ = fit_rules(self.rules, real)
        self.real_ = real
        return self

    def check(self, data: TableData) -> ViolationReport:
        rules = getattr(self, "rules_", None)
        if rules is None:
            raise NotFittedError("DomainValidator is not fitted; call fit(real) first")
        return check(rules, data, reference=self.real_)
