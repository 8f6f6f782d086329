"""k-way marginal counting over aligned real/synth pairs.

A marginal table holds joint counts for one tuple of categorical (or
pre-binned numeric) columns, restricted to cells observed on at least one
side. Cells are kept in ascending composite-code order so downstream reports
and plots are byte-stable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadTuple
from .schema import CATEGORICAL, Schema
from .table import AlignedPair, CategoricalColumn

# VariableTuple: strictly increasing column indices into the schema.
VariableTuple = tuple[int, ...]

# Above this many possible cells, counting switches from a dense bincount to
# a sort-based sparse path.
DENSE_CELL_CAP = 4_000_000


def enumerate_tuples(schema: Schema, k: int, kind: str = CATEGORICAL) -> list[VariableTuple]:
    """All C(n, k) index tuples over columns of the given kind, ascending."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    indices = schema.indices_of_kind(kind)
    return [tuple(t) for t in itertools.combinations(indices, k)]


@dataclass
class MarginalTable:
    var_tuple: VariableTuple
    names: tuple[str, ...]
    level_names: tuple[tuple[str, ...], ...]  # per tuple column
    cell_codes: np.ndarray    # (n_cells, k) int64, lexicographically sorted
    count_real: np.ndarray    # (n_cells,) int64
    count_synth: np.ndarray
    n_real: int               # rows counted after missing exclusion
    n_synth: int

    def __post_init__(self):
        if self.cell_codes.ndim != 2 or self.cell_codes.shape[1] != len(self.var_tuple):
            raise ValueError("cell_codes shape does not match tuple degree")
        if not (len(self.count_real) == len(self.count_synth) == len(self.cell_codes)):
            raise ValueError("ragged cell arrays")

    @property
    def k(self) -> int:
        return len(self.var_tuple)

    @property
    def n_cells(self) -> int:
        return len(self.cell_codes)

    def p_real(self) -> np.ndarray:
        return self.count_real / self.n_real if self.n_real else np.zeros(self.n_cells)

    def p_synth(self) -> np.ndarray:
        return self.count_synth / self.n_synth if self.n_synth else np.zeros(self.n_cells)

    def cells(self) -> dict[tuple[int, ...], tuple[int, int]]:
        """Mapping view, handy for tests and small tables."""
        return {
            tuple(int(c) for c in row): (int(r), int(s))
            for row, r, s in zip(self.cell_codes, self.count_real, self.count_synth)
        }

    def cell_labels(self, i: int) -> tuple[str, ...]:
        return tuple(
            self.level_names[j][code] for j, code in enumerate(self.cell_codes[i])
        )


def _composite_codes(
    cols: list[CategoricalColumn], sizes: list[int]
) -> tuple[np.ndarray, int]:
    """Flatten tuple codes to one int64 per row, dropping excluded rows."""
    keep: np.ndarray | None = None
    for c in cols:
        if c.excluded is not None:
            keep = ~c.excluded if keep is None else keep & ~c.excluded
    code = np.zeros(len(cols[0]), dtype=np.int64)
    for c, size in zip(cols, sizes):
        code = code * size + c.codes
    if keep is not None:
        code = code[keep]
    return code, int(code.size)


def count_marginal(pair: AlignedPair, var_tuple: VariableTuple) -> MarginalTable:
    """Joint real/synth counts for one column tuple of the aligned pair."""
    k = len(var_tuple)
    if k < 1:
        raise BadTuple("empty variable tuple")
    if any(b <= a for a, b in zip(var_tuple, var_tuple[1:])):
        raise BadTuple(f"tuple indices must be strictly increasing: {var_tuple}")
    n_cols = len(pair.schema.columns)
    if var_tuple[0] < 0 or var_tuple[-1] >= n_cols:
        raise BadTuple(f"tuple index out of range: {var_tuple}")
    for i in var_tuple:
        if pair.schema.columns[i].kind != CATEGORICAL:
            raise BadTuple(
                f"column {pair.schema.columns[i].name!r} is numerical; bin it first"
            )

    rcols = [pair.real.columns[i] for i in var_tuple]
    scols = [pair.synth.columns[i] for i in var_tuple]
    assert all(isinstance(c, CategoricalColumn) for c in rcols + scols)
    sizes = [len(c.levels) for c in rcols]
    for rc, sc in zip(rcols, scols):
        if rc.levels != sc.levels:
            raise BadTuple(f"column {rc.name!r}: dictionaries not aligned")

    r_comp, n_real = _composite_codes(rcols, sizes)
    s_comp, n_synth = _composite_codes(scols, sizes)

    n_possible = 1
    for size in sizes:
        n_possible *= size
    if n_possible <= DENSE_CELL_CAP:
        r_counts = np.bincount(r_comp, minlength=n_possible)
        s_counts = np.bincount(s_comp, minlength=n_possible)
        flat = np.flatnonzero(r_counts + s_counts)
        count_real = r_counts[flat]
        count_synth = s_counts[flat]
    else:
        flat = np.unique(np.concatenate([r_comp, s_comp]))
        count_real = np.bincount(
            np.searchsorted(flat, r_comp), minlength=flat.size
        )
        count_synth = np.bincount(
            np.searchsorted(flat, s_comp), minlength=flat.size
        )

    # unflatten composite codes back to per-column codes
    cell_codes = np.empty((flat.size, k), dtype=np.int64)
    rest = flat
    for j in range(k - 1, -1, -1):
        rest, cell_codes[:, j] = np.divmod(rest, sizes[j])

    return MarginalTable(
        var_tuple=tuple(var_tuple),
        names=tuple(pair.schema.columns[i].name for i in var_tuple),
        level_names=tuple(tuple(c.levels) for c in rcols),
        cell_codes=cell_codes,
        count_real=count_real.astype(np.int64),
        count_synth=count_synth.astype(np.int64),
        n_real=n_real,
        n_synth=n_synth,
    )
