"""In-memory tables: typed columns, CSV I/O, profiles and dictionary alignment.

Categorical cells are stored as integer codes into a per-column sorted level
dictionary. Missing categorical cells become an ordinary level (MISSING_LEVEL),
so they take part in counting like any other value. Missing numeric cells are
kept as a mask and are excluded from metrics downstream.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyFile, MissingColumn, ParseError, SchemaMismatch
from .schema import CATEGORICAL, NUMERICAL, Schema, ensure_same_schema

# Literal level a categorical missing token is mapped to. Guillemets keep it
# from colliding with ordinary data values.
MISSING_LEVEL = "«missing»"


@dataclass
class CategoricalColumn:
    name: str
    codes: np.ndarray          # int64, values in [0, len(levels))
    levels: tuple[str, ...]    # sorted, unique
    # Rows masked here never enter marginal counts. Only bin-index columns
    # built from numeric columns with missing cells set this; codes under the
    # mask are a placeholder 0.
    excluded: np.ndarray | None = None

    def __post_init__(self):
        self.codes = np.asarray(self.codes, dtype=np.int64)
        if self.codes.ndim != 1:
            raise ValueError(f"column {self.name!r}: codes must be 1-D")
        if len(self.levels) != len(set(self.levels)):
            raise ValueError(f"column {self.name!r}: duplicate levels")
        if self.codes.size and (self.codes.min() < 0 or self.codes.max() >= len(self.levels)):
            raise ValueError(f"column {self.name!r}: code out of range")
        if self.excluded is not None:
            self.excluded = np.asarray(self.excluded, dtype=bool)
            if self.excluded.shape != self.codes.shape:
                raise ValueError(f"column {self.name!r}: excluded mask shape mismatch")

    def __len__(self) -> int:
        return self.codes.size

    def counted_codes(self) -> np.ndarray:
        return self.codes if self.excluded is None else self.codes[~self.excluded]

    def decode(self) -> list[str]:
        return [self.levels[c] for c in self.codes]

    def observed_levels(self) -> tuple[str, ...]:
        """Levels that actually occur, missing excluded."""
        seen = np.unique(self.counted_codes())
        return tuple(self.levels[c] for c in seen if self.levels[c] != MISSING_LEVEL)

    def missing_count(self) -> int:
        if self.excluded is not None:
            return int(np.count_nonzero(self.excluded))
        if MISSING_LEVEL not in self.levels:
            return 0
        return int(np.count_nonzero(self.codes == self.levels.index(MISSING_LEVEL)))


@dataclass
class NumericColumn:
    name: str
    values: np.ndarray   # float64; entries under the mask are undefined
    missing: np.ndarray  # bool

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.missing = np.asarray(self.missing, dtype=bool)
        if self.values.shape != self.missing.shape or self.values.ndim != 1:
            raise ValueError(f"column {self.name!r}: values/missing shape mismatch")
        present = self.values[~self.missing]
        if present.size and not np.all(np.isfinite(present)):
            raise ValueError(f"column {self.name!r}: non-finite value")

    def __len__(self) -> int:
        return self.values.size

    def present(self) -> np.ndarray:
        return self.values[~self.missing]

    def missing_count(self) -> int:
        return int(np.count_nonzero(self.missing))


Column = CategoricalColumn | NumericColumn


@dataclass
class TableData:
    schema: Schema
    columns: list[Column]

    def __post_init__(self):
        if [c.name for c in self.columns] != self.schema.names:
            raise ValueError("columns do not match schema order")
        for spec, col in zip(self.schema.columns, self.columns):
            want = CategoricalColumn if spec.kind == CATEGORICAL else NumericColumn
            if not isinstance(col, want):
                raise ValueError(f"column {spec.name!r}: expected {spec.kind}")
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: lengths {sorted(lengths)}")

    @property
    def n_rows(self) -> int:
        return len(self.columns[0])

    def column(self, name: str) -> Column:
        try:
            return self.columns[self.schema.names.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def categorical(self, name: str) -> CategoricalColumn:
        col = self.column(name)
        assert isinstance(col, CategoricalColumn)
        return col

    def numeric(self, name: str) -> NumericColumn:
        col = self.column(name)
        assert isinstance(col, NumericColumn)
        return col

    @classmethod
    def from_columns(cls, schema: Schema, data: dict[str, list]) -> "TableData":
        """Build a table from raw per-column values.

        Categorical cells are str (or anything str()-able); the schema's
        missing token and None both map to MISSING_LEVEL. Numeric cells are
        numbers, None, or the missing token.
        """
        missing = schema.missing_token
        cols: list[Column] = []
        for spec in schema.columns:
            if spec.name not in data:
                raise MissingColumn(f"column {spec.name!r} not in data")
            raw = data[spec.name]
            if spec.kind == CATEGORICAL:
                texts = [
                    MISSING_LEVEL if v is None or str(v) == missing else str(v)
                    for v in raw
                ]
                levels = tuple(sorted(set(texts)))
                index = {lev: i for i, lev in enumerate(levels)}
                codes = np.fromiter((index[t] for t in texts), dtype=np.int64, count=len(texts))
                cols.append(CategoricalColumn(spec.name, codes, levels))
            else:
                vals = np.zeros(len(raw), dtype=np.float64)
                mask = np.zeros(len(raw), dtype=bool)
                for i, v in enumerate(raw):
                    if v is None or (isinstance(v, str) and v == missing):
                        mask[i] = True
                    else:
                        vals[i] = float(v)
                cols.append(NumericColumn(spec.name, vals, mask))
        return cls(schema, cols)

    def to_rows(self) -> list[list[str]]:
        """Rows as text, missing cells rendered with the schema's token."""
        missing = self.schema.missing_token
        rendered: list[list[str]] = []
        for col in self.columns:
            if isinstance(col, CategoricalColumn):
                rendered.append(
                    [missing if t == MISSING_LEVEL else t for t in col.decode()]
                )
            else:
                rendered.append(
                    [missing if m else repr(float(v)) for v, m in zip(col.values, col.missing)]
                )
        return [list(row) for row in zip(*rendered)] if rendered and self.n_rows else []


def load_csv(path: str | Path, schema: Schema) -> TableData:
    """Read a CSV against an explicit schema.

    Extra columns are ignored; a schema column absent from the header raises
    MissingColumn. An unparseable numeric cell raises ParseError carrying the
    1-based file line and the column name.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: no header row") from None
        positions: dict[str, int] = {}
        for spec in schema.columns:
            try:
                positions[spec.name] = header.index(spec.name)
            except ValueError:
                raise MissingColumn(f"{path}: column {spec.name!r} not in header") from None
        raw: dict[str, list[str]] = {name: [] for name in positions}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue  # blank trailing line
            for name, pos in positions.items():
                if pos >= len(row):
                    raise ParseError(
                        f"{path}: line {lineno}: short row", row=lineno, column=name
                    )
                raw[name].append(row[pos])

    missing = schema.missing_token
    n = len(next(iter(raw.values()))) if raw else 0
    cols: list[Column] = []
    for spec in schema.columns:
        texts = raw[spec.name]
        if spec.kind == CATEGORICAL:
            mapped = [MISSING_LEVEL if t == missing else t for t in texts]
            levels = tuple(sorted(set(mapped)))
            index = {lev: i for i, lev in enumerate(levels)}
            codes = np.fromiter((index[t] for t in mapped), dtype=np.int64, count=n)
            cols.append(CategoricalColumn(spec.name, codes, levels))
        else:
            vals = np.zeros(n, dtype=np.float64)
            mask = np.zeros(n, dtype=bool)
            for i, t in enumerate(texts):
                if t == missing:
                    mask[i] = True
                    continue
                try:
                    v = float(t)
                except ValueError:
                    raise ParseError(
                        f"{path}: line {i + 2}: column {spec.name!r}: "
                        f"cannot parse {t!r} as a number",
                        row=i + 2,
                        column=spec.name,
                    ) from None
                if not np.isfinite(v):
                    raise ParseError(
                        f"{path}: line {i + 2}: column {spec.name!r}: "
                        f"non-finite value {t!r}",
                        row=i + 2,
                        column=spec.name,
                    )
                vals[i] = v
            cols.append(NumericColumn(spec.name, vals, mask))
    return TableData(schema, cols)


def write_csv(table: TableData, path: str | Path) -> None:
    """Write a table; floats use repr so a round-trip is value-exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.schema.names)
        writer.writerows(table.to_rows())


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    kind: str
    n_missing: int
    missing_rate: float
    n_levels: int = 0              # categorical: distinct observed levels, missing included
    levels: tuple[str, ...] = ()   # categorical: observed levels, missing excluded
    minimum: float | None = None   # numeric only, over present cells
    maximum: float | None = None
    mean: float | None = None


@dataclass(frozen=True)
class DatasetProfile:
    n_samples: int
    n_categorical: int
    n_numerical: int
    total_categories: int          # sum of observed dictionary sizes, «missing» included
    columns: tuple[ColumnProfile, ...]

    @property
    def vector_size(self) -> int:
        """Width of the table after one-hot encoding the categorical columns."""
        return self.total_categories + self.n_numerical

    def column(self, name: str) -> ColumnProfile:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)


def profile(table: TableData) -> DatasetProfile:
    n = table.n_rows
    cols: list[ColumnProfile] = []
    total_categories = 0
    for spec, col in zip(table.schema.columns, table.columns):
        miss = col.missing_count()
        rate = miss / n if n else 0.0
        if isinstance(col, CategoricalColumn):
            # count observed codes, not dictionary length: a table recoded onto
            # a merged dictionary may carry levels it never uses
            n_levels = int(np.unique(col.codes).size)
            total_categories += n_levels
            cols.append(
                ColumnProfile(spec.name, spec.kind, miss, rate,
                              n_levels=n_levels, levels=col.observed_levels())
            )
        else:
            present = col.present()
            if present.size:
                cols.append(
                    ColumnProfile(
                        spec.name, spec.kind, miss, rate,
                        minimum=float(present.min()),
                        maximum=float(present.max()),
                        mean=float(present.mean()),
                    )
                )
            else:
                cols.append(ColumnProfile(spec.name, spec.kind, miss, rate))
    n_cat = len(table.schema.indices_of_kind(CATEGORICAL))
    return DatasetProfile(n, n_cat, len(table.schema.columns) - n_cat,
                          total_categories, tuple(cols))


SHARED = "shared"
REAL_ONLY = "real_only"
SYNTH_ONLY = "synth_only"


@dataclass(frozen=True)
class MergedLevels:
    """Union dictionary for one categorical column across a real/synth pair."""

    name: str
    levels: tuple[str, ...]
    in_real: np.ndarray   # bool per level
    in_synth: np.ndarray

    def flag(self, i: int) -> str:
        if self.in_real[i] and self.in_synth[i]:
            return SHARED
        return REAL_ONLY if self.in_real[i] else SYNTH_ONLY

    @property
    def flags(self) -> tuple[str, ...]:
        return tuple(self.flag(i) for i in range(len(self.levels)))


@dataclass
class AlignedPair:
    """A real/synth table pair recoded onto shared per-column dictionaries."""

    schema: Schema
    real: TableData
    synth: TableData
    merged: dict[str, MergedLevels]


def _recode(col: CategoricalColumn, union: tuple[str, ...]) -> CategoricalColumn:
    index = {lev: i for i, lev in enumerate(union)}
    mapping = np.fromiter((index[lev] for lev in col.levels), dtype=np.int64,
                          count=len(col.levels))
    new_codes = mapping[col.codes] if col.codes.size else col.codes.copy()
    return CategoricalColumn(col.name, new_codes, union, col.excluded)


def align_dictionaries(real: TableData, synth: TableData) -> AlignedPair:
    """Recode both tables onto the sorted union of observed levels per column.

    Only levels that occur in at least one table enter the union, so the
    result is invariant under row permutation of either side.
    """
    ensure_same_schema(real.schema, synth.schema)
    merged: dict[str, MergedLevels] = {}
    real_cols: list[Column] = []
    synth_cols: list[Column] = []
    for spec in real.schema.columns:
        if spec.kind != CATEGORICAL:
            real_cols.append(real.column(spec.name))
            synth_cols.append(synth.column(spec.name))
            continue
        rcol = real.categorical(spec.name)
        scol = synth.categorical(spec.name)
        r_seen = {rcol.levels[c] for c in np.unique(rcol.counted_codes())}
        s_seen = {scol.levels[c] for c in np.unique(scol.counted_codes())}
        union = tuple(sorted(r_seen | s_seen))
        in_real = np.fromiter((lev in r_seen for lev in union), dtype=bool, count=len(union))
        in_synth = np.fromiter((lev in s_seen for lev in union), dtype=bool, count=len(union))
        merged[spec.name] = MergedLevels(spec.name, union, in_real, in_synth)
        real_cols.append(_recode(rcol, union))
        synth_cols.append(_recode(scol, union))
    return AlignedPair(
        real.schema,
        TableData(real.schema, real_cols),
        TableData(real.schema, synth_cols),
        merged,
    )
