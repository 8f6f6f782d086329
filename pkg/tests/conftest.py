"""Shared fixtures: seeded random schemas and tables, plus row-level views
that the oracles can consume directly."""
from __future__ import annotations

import random
import string

import numpy as np
import pytest

from synthqa.schema import CATEGORICAL, NUMERICAL, Schema
from synthqa.table import MISSING_LEVEL, TableData


def random_schema(rng, max_cols=10, kinds=(CATEGORICAL, NUMERICAL)):
    n_cols = rng.randint(1, max_cols)
    pairs = []
    for i in range(n_cols):
        kind = rng.choice(kinds)
        pairs.append((f"col{i}", kind))
    return Schema.of(pairs)


def random_levels(rng, max_levels):
    n = rng.randint(1, max_levels)
    alphabet = string.ascii_lowercase
    out = set()
    while len(out) < n:
        out.add("".join(rng.choice(alphabet) for _ in range(rng.randint(1, 4))))
    return sorted(out)


def random_table(rng, schema, n_rows, max_levels=6, missing_rate=0.0,
                 level_pool=None):
    """Build a TableData with optional missing cells. level_pool maps column
    name to the levels to draw from, letting real/synth pairs share or split
    vocabularies."""
    data = {}
    for spec in schema.columns:
        if spec.kind == CATEGORICAL:
            pool = (level_pool or {}).get(spec.name) or random_levels(rng, max_levels)
            cells = []
            for _ in range(n_rows):
                if missing_rate and rng.random() < missing_rate:
                    cells.append(MISSING_LEVEL)
                else:
                    cells.append(rng.choice(pool))
            data[spec.name] = cells
        else:
            cells = []
            for _ in range(n_rows):
                if missing_rate and rng.random() < missing_rate:
                    cells.append(None)
                else:
                    cells.append(rng.uniform(-10, 10))
            data[spec.name] = cells
    return TableData.from_columns(schema, data)


def table_rows(table):
    """Row-major view for the oracles: categorical cells as level strings
    (missing included as the missing level), numeric missing as None."""
    cols = []
    for spec in table.schema.columns:
        col = table.column(spec.name)
        if spec.kind == CATEGORICAL:
            values = [col.levels[c] for c in col.codes]
            if col.excluded is not None:
                values = [None if e else v for v, e in zip(values, col.excluded)]
            cols.append(values)
        else:
            cols.append([None if m else float(v)
                         for v, m in zip(col.values, col.missing)])
    return list(map(list, zip(*cols))) if cols else []


@pytest.fixture
def rng():
    return random.Random(20240817)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240817)
