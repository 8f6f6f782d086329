"""Explicit column schemas.

Schemas are never inferred from data: whether a column is categorical or
numerical must come from a JSON sidecar (integer-coded categories are
indistinguishable from counts otherwise).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaMismatch

CATEGORICAL = "categorical"
NUMERICAL = "numerical"
KINDS = (CATEGORICAL, NUMERICAL)


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("column name must be non-empty")
        if self.kind not in KINDS:
            raise ValueError(f"column {self.name!r}: kind must be one of {KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Schema:
    columns: tuple[ColumnSpec, ...]
    missing_token: str = ""

    def __post_init__(self):
        if not self.columns:
            raise ValueError("schema needs at least one column")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate column names: {dupes}")

    @classmethod
    def of(cls, pairs: list[tuple[str, str]], missing_token: str = "") -> "Schema":
        """Build from (name, kind) pairs; convenience for tests and fixtures."""
        return cls(tuple(ColumnSpec(n, k) for n, k in pairs), missing_token)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def kind_of(self, name: str) -> str:
        for c in self.columns:
            if c.name == name:
                return c.kind
        raise KeyError(name)

    def names_of_kind(self, kind: str) -> list[str]:
        return [c.name for c in self.columns if c.kind == kind]

    def indices_of_kind(self, kind: str) -> list[int]:
        return [i for i, c in enumerate(self.columns) if c.kind == kind]

    def with_kinds(self, overrides: dict[str, str]) -> "Schema":
        """Copy of the schema with some column kinds replaced (used by binning)."""
        cols = tuple(
            ColumnSpec(c.name, overrides.get(c.name, c.kind)) for c in self.columns
        )
        return Schema(cols, self.missing_token)

    def to_dict(self) -> dict:
        return {
            "columns": [{"name": c.name, "kind": c.kind} for c in self.columns],
            "missing_token": self.missing_token,
        }


def schema_from_dict(obj: dict) -> Schema:
    try:
        cols = tuple(ColumnSpec(c["name"], c["kind"]) for c in obj["columns"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed schema object: {exc}") from exc
    return Schema(cols, str(obj.get("missing_token", "")))


def load_schema(path: str | Path) -> Schema:
    """Load a schema from its JSON sidecar file."""
    with open(path, encoding="utf-8") as fh:
        return schema_from_dict(json.load(fh))


def save_schema(schema: Schema, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(schema.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


def ensure_same_schema(a: Schema, b: Schema) -> None:
    """Raise SchemaMismatch unless both schemas agree in names, kinds and order."""
    if a != b:
        raise SchemaMismatch(
            f"schemas differ: {a.to_dict()} vs {b.to_dict()}"
        )
