"""Declarative domain-validity rules for coded tabular data.

Three rule shapes cover the usual medical-coding constraints: hierarchical
prefix consistency (a 3-character code must prefix the full code), forbidden
value pairs (sex-exclusive diagnoses), and per-group ranges over an ordinal or
numeric column (ages observed per diagnosis). Violations are combinations that
are invalid in the domain, which is deliberately narrower than "absent from
the real data": an unseen but valid combination is the Invented metric's
business, not a rule violation.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InvalidRule, UnknownColumn
from .schema import CATEGORICAL, NUMERICAL, Schema
from .table import MISSING_LEVEL, CategoricalColumn, TableData

WILDCARD = "*"
EXAMPLE_CAP = 10


@dataclass(frozen=True)
class PrefixRule:
    full_col: str
    prefix_col: str

    @property
    def rule_id(self) -> str:
        return f"prefix({self.full_col},{self.prefix_col})"

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.full_col, self.prefix_col)


@dataclass(frozen=True)
class ExclusionRule:
    col_a: str
    col_b: str
    forbidden_pairs: tuple[tuple[str, str], ...]  # "*" wildcards one side

    @property
    def rule_id(self) -> str:
        return f"exclusion({self.col_a},{self.col_b})"

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.col_a, self.col_b)

    def forbids(self, a: str, b: str) -> bool:
        for pa, pb in self.forbidden_pairs:
            if (pa == WILDCARD or pa == a) and (pb == WILDCARD or pb == b):
                return True
        return False


@dataclass(frozen=True)
class RangeRule:
    group_col: str
    bounded_col: str
    # ordinal bounded column: full ordered level list; numeric: None
    ordered_levels: tuple[str, ...] | None = None
    # group level -> (min, max); ordinal bounds are positions in ordered_levels
    bounds: dict[str, tuple[float, float]] | None = None

    @property
    def rule_id(self) -> str:
        return f"range({self.group_col},{self.bounded_col})"

    @property
    def columns(self) -> tuple[str, ...]:
        return (self.group_col, self.bounded_col)

    @property
    def is_ordinal(self) -> bool:
        return self.ordered_levels is not None

    @property
    def fitted(self) -> bool:
        return self.bounds is not None


Rule = PrefixRule | ExclusionRule | RangeRule


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]

    def validate_against(self, schema: Schema) -> None:
        names = set(schema.names)
        for rule in self.rules:
            for col in rule.columns:
                if col not in names:
                    raise UnknownColumn(
                        f"{rule.rule_id}: column {col!r} not in schema"
                    )
            if isinstance(rule, RangeRule):
                if schema.kind_of(rule.group_col) != CATEGORICAL:
                    raise InvalidRule(f"{rule.rule_id}: group column must be categorical")
                bounded_kind = schema.kind_of(rule.bounded_col)
                if rule.is_ordinal and bounded_kind != CATEGORICAL:
                    raise InvalidRule(
                        f"{rule.rule_id}: ordered_levels given for a numerical column"
                    )
                if not rule.is_ordinal and bounded_kind != NUMERICAL:
                    raise InvalidRule(
                        f"{rule.rule_id}: numeric range over a categorical column "
                        "needs ordered_levels"
                    )
            else:
                for col in rule.columns:
                    if schema.kind_of(col) != CATEGORICAL:
                        raise InvalidRule(f"{rule.rule_id}: column {col!r} must be categorical")


def rule_from_dict(obj: dict) -> Rule:
    kind = obj.get("type")
    if kind == "prefix":
        return PrefixRule(obj["full_col"], obj["prefix_col"])
    if kind == "exclusion":
        pairs = tuple((str(a), str(b)) for a, b in obj["forbidden_pairs"])
        if not pairs:
            raise InvalidRule("exclusion rule with no forbidden pairs")
        return ExclusionRule(obj["col_a"], obj["col_b"], pairs)
    if kind == "range":
        ordered = obj.get("ordered_levels")
        bounds = obj.get("bounds")
        return RangeRule(
            obj["group_col"],
            obj["bounded_col"],
            tuple(str(v) for v in ordered) if ordered is not None else None,
            {str(k): (float(v[0]), float(v[1])) for k, v in bounds.items()}
            if bounds is not None else None,
        )
    raise InvalidRule(f"unknown rule type {kind!r}")


def load_rules(path: str | Path) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        rules = tuple(rule_from_dict(r) for r in doc["rules"])
    except (KeyError, TypeError) as exc:
        raise InvalidRule(f"malformed rule file {path}: {exc}") from exc
    return RuleSet(rules)


def shipped_rules_path() -> Path:
    """Path of the example ICD rule file installed with the package."""
    return Path(__file__).parent / "data" / "icd_rules.json"


def fit_range_rule(rule: RangeRule, real: TableData) -> RangeRule:
    """Fill per-group (min, max) bounds from real data.

    Rows with a missing group or bounded value contribute nothing; a group
    level whose rows all lack a bounded value simply gets no bound.
    """
    if rule.fitted:
        return rule
    gcol = real.categorical(rule.group_col)
    bounds: dict[str, tuple[float, float]] = {}
    if rule.is_ordinal:
        bcol = real.categorical(rule.bounded_col)
        position: dict[str, int] = {lev: i for i, lev in enumerate(rule.ordered_levels)}
        for lev in bcol.observed_levels():
            if lev not in position:
                raise InvalidRule(
                    f"{rule.rule_id}: level {lev!r} observed in real data is not "
                    "in ordered_levels"
                )
        values = np.array(
            [position.get(lev, -1) for lev in bcol.levels], dtype=np.float64
        )[bcol.codes]
        present = np.array(
            [lev != MISSING_LEVEL for lev in bcol.levels], dtype=bool
        )[bcol.codes]
    else:
        ncol = real.numeric(rule.bounded_col)
        values = ncol.values
        present = ~ncol.missing
    for gi, glev in enumerate(gcol.levels):
        if glev == MISSING_LEVEL:
            continue
        mask = (gcol.codes == gi) & present
        if not mask.any():
            continue
        sub = values[mask]
        bounds[glev] = (float(sub.min()), float(sub.max()))
    return replace(rule, bounds=bounds)


def fit_rules(rules: RuleSet, real: TableData) -> RuleSet:
    """Fit every unfitted RangeRule against real data."""
    rules.validate_against(real.schema)
    fitted = tuple(
        fit_range_rule(r, real) if isinstance(r, RangeRule) and not r.fitted else r
        for r in rules.rules
    )
    return RuleSet(fitted)


@dataclass(frozen=True)
class RuleResult:
    rule_id: str
    rule_type: str
    columns: tuple[str, ...]
    n_distinct_violating_level_pairs: int
    n_rows_affected: int
    pct_samples_affected: float
    possible_levels: int | None
    levels_observed_in_real: int | None
    examples: tuple[tuple[str, str], ...]  # capped, decoded value pairs

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "rule_type": self.rule_type,
            "columns": list(self.columns),
            "n_distinct_violating_level_pairs": self.n_distinct_violating_level_pairs,
            "n_rows_affected": self.n_rows_affected,
            "pct_samples_affected": self.pct_samples_affected,
            "possible_levels": self.possible_levels,
            "levels_observed_in_real": self.levels_observed_in_real,
            "examples": [list(e) for e in self.examples],
        }


@dataclass(frozen=True)
class ViolationReport:
    n_rows: int
    results: tuple[RuleResult, ...]

    @property
    def total_rows_affected(self) -> int:
        """Rows violating at least one rule are counted once per rule here."""
        return sum(r.n_rows_affected for r in self.results)

    def to_dict(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "rules": [r.to_dict() for r in self.results],
        }

    def write_csv(self, path: str | Path) -> None:
        """Table-7-style layout: one row per rule."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                [
                    "rule", "type", "columns",
                    "distinct_violating_level_pairs", "rows_affected",
                    "pct_samples_affected", "possible_levels",
                    "levels_observed_in_real",
                ]
            )
            for r in self.results:
                writer.writerow(
                    [
                        r.rule_id, r.rule_type, "|".join(r.columns),
                        r.n_distinct_violating_level_pairs, r.n_rows_affected,
                        f"{100.0 * r.pct_samples_affected:.4f}%",
                        "" if r.possible_levels is None else r.possible_levels,
                        "" if r.levels_observed_in_real is None else r.levels_observed_in_real,
                    ]
                )


def _distinct_pairs(
    a: CategoricalColumn, b: CategoricalColumn
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct (code_a, code_b) pairs and their row counts."""
    keep = np.ones(len(a), dtype=bool)
    if a.excluded is not None:
        keep &= ~a.excluded
    if b.excluded is not None:
        keep &= ~b.excluded
    comp = a.codes[keep] * np.int64(len(b.levels)) + b.codes[keep]
    pairs, counts = np.unique(comp, return_counts=True)
    return pairs // len(b.levels), pairs % len(b.levels), counts


def _pair_stats(
    reference: TableData | None, col_a: str, col_b: str
) -> tuple[int | None, int | None]:
    """Cardinality product and distinct observed pairs, missing excluded."""
    if reference is None:
        return None, None
    a = reference.categorical(col_a)
    b = reference.categorical(col_b)
    n_possible = len(a.observed_levels()) * len(b.observed_levels())
    ca, cb, _ = _distinct_pairs(a, b)
    observed = sum(
        1 for i, j in zip(ca, cb)
        if a.levels[i] != MISSING_LEVEL and b.levels[j] != MISSING_LEVEL
    )
    return n_possible, observed


def _check_pairwise(
    rule: PrefixRule | ExclusionRule,
    data: TableData,
    reference: TableData | None,
) -> RuleResult:
    col_a, col_b = rule.columns
    a = data.categorical(col_a)
    b = data.categorical(col_b)
    ca, cb, counts = _distinct_pairs(a, b)
    violating: list[tuple[str, str]] = []
    rows = 0
    for i, j, c in zip(ca, cb, counts):
        va = a.levels[i]
        vb = b.levels[j]
        if isinstance(rule, PrefixRule):
            if va == MISSING_LEVEL or vb == MISSING_LEVEL:
                continue  # missing cells never violate structural rules
            bad = not va.startswith(vb)
        else:
            bad = rule.forbids(va, vb)
        if bad:
            violating.append((va, vb))
            rows += int(c)
    possible, observed = _pair_stats(reference, col_a, col_b)
    return RuleResult(
        rule_id=rule.rule_id,
        rule_type="prefix" if isinstance(rule, PrefixRule) else "exclusion",
        columns=rule.columns,
        n_distinct_violating_level_pairs=len(violating),
        n_rows_affected=rows,
        pct_samples_affected=rows / data.n_rows if data.n_rows else 0.0,
        possible_levels=possible,
        levels_observed_in_real=observed,
        examples=tuple(sorted(violating)[:EXAMPLE_CAP]),
    )


def _check_range(
    rule: RangeRule, data: TableData, reference: TableData | None
) -> RuleResult:
    if not rule.fitted:
        raise InvalidRule(f"{rule.rule_id}: bounds neither given nor fitted")
    gcol = data.categorical(rule.group_col)

    if rule.is_ordinal:
        bcol = data.categorical(rule.bounded_col)
        position = {lev: i for i, lev in enumerate(rule.ordered_levels)}
        ca, cb, counts = _distinct_pairs(gcol, bcol)
        violating: list[tuple[str, str]] = []
        rows = 0
        for i, j, c in zip(ca, cb, counts):
            g = gcol.levels[i]
            v = bcol.levels[j]
            if g == MISSING_LEVEL or v == MISSING_LEVEL:
                continue
            if g not in rule.bounds:
                continue  # group unseen in real: Invented's business, not ours
            pos = position.get(v)
            lo, hi = rule.bounds[g]
            # a bounded level outside the declared order is out of domain
            if pos is None or pos < lo or pos > hi:
                violating.append((g, v))
                rows += int(c)
        possible, observed = _pair_stats(reference, rule.group_col, rule.bounded_col)
    else:
        ncol = data.numeric(rule.bounded_col)
        g_missing = np.array(
            [lev == MISSING_LEVEL for lev in gcol.levels], dtype=bool
        )[gcol.codes]
        valid = ~g_missing & ~ncol.missing
        lo = np.full(len(gcol.levels), -np.inf)
        hi = np.full(len(gcol.levels), np.inf)
        bounded_group = np.zeros(len(gcol.levels), dtype=bool)
        for gi, glev in enumerate(gcol.levels):
            if glev in rule.bounds:
                lo[gi], hi[gi] = rule.bounds[glev]
                bounded_group[gi] = True
        bad = valid & bounded_group[gcol.codes] & (
            (ncol.values < lo[gcol.codes]) | (ncol.values > hi[gcol.codes])
        )
        rows = int(np.count_nonzero(bad))
        pairs = {
            (gcol.levels[gc], repr(float(v)))
            for gc, v in zip(gcol.codes[bad], ncol.values[bad])
        }
        violating = sorted(pairs)
        # no finite level product exists for a continuous bounded column
        possible, observed = None, None
    return RuleResult(
        rule_id=rule.rule_id,
        rule_type="range",
        columns=rule.columns,
        n_distinct_violating_level_pairs=len(violating),
        n_rows_affected=rows,
        pct_samples_affected=rows / data.n_rows if data.n_rows else 0.0,
        possible_levels=possible,
        levels_observed_in_real=observed,
        examples=tuple(sorted(violating)[:EXAMPLE_CAP]),
    )


def check(
    rules: RuleSet, data: TableData, reference: TableData | None = None
) -> ViolationReport:
    """Evaluate every rule against a table.

    reference (normally the real table) only feeds the possible_levels and
    levels_observed_in_real bookkeeping; violations are counted on data alone.
    """
    rules.validate_against(data.schema)
    results = []
    for rule in rules.rules:
        if isinstance(rule, RangeRule):
            results.append(_check_range(rule, data, reference))
        else:
            results.append(_check_pairwise(rule, data, reference))
    return ViolationReport(data.n_rows, tuple(results))
