"""Search-space declaration: typed parameters plus optional strata.

A stratum is a named overlay pinning some parameters to fixed values; each
stratum runs as its own study and results are merged at ranking time.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class FloatParam:
    name: str
    low: float
    high: float
    log_scale: bool = False

    def __post_init__(self):
        if not self.low < self.high:
            raise ValueError(f"{self.name}: low must be < high")
        if self.log_scale and self.low <= 0:
            raise ValueError(f"{self.name}: log scale needs positive bounds")


@dataclass(frozen=True)
class IntParam:
    name: str
    low: int
    high: int
    log_scale: bool = False

    def __post_init__(self):
        if not self.low < self.high:
            raise ValueError(f"{self.name}: low must be < high")
        if self.log_scale and self.low <= 0:
            raise ValueError(f"{self.name}: log scale needs positive bounds")


@dataclass(frozen=True)
class CategoricalParam:
    name: str
    choices: tuple

    def __post_init__(self):
        if not self.choices:
            raise ValueError(f"{self.name}: choices must be nonempty")
        if len(set(self.choices)) != len(self.choices):
            raise ValueError(f"{self.name}: duplicate choices")


@dataclass(frozen=True)
class FixedParam:
    name: str
    value: object


Param = FloatParam | IntParam | CategoricalParam | FixedParam


@dataclass(frozen=True)
class Stratum:
    name: str
    overrides: dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class SearchSpace:
    params: tuple[Param, ...]
    strata: tuple[Stratum, ...] = ()

    def __post_init__(self):
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")
        for s in self.strata:
            unknown = set(s.overrides) - set(names)
            if unknown:
                raise ValueError(f"stratum {s.name!r} overrides unknown parameters {sorted(unknown)}")

    @property
    def names(self) -> list[str]:
        return [p.name for p in self.params]

    def param(self, name: str) -> Param:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def free_params(self) -> list[Param]:
        return [p for p in self.params if not isinstance(p, FixedParam)]

    def apply_stratum(self, stratum: Stratum) -> "SearchSpace":
        """Pin the overlaid parameters; the result has no strata of its own."""
        pinned = tuple(
            FixedParam(p.name, stratum.overrides[p.name])
            if p.name in stratum.overrides else p
            for p in self.params
        )
        return SearchSpace(pinned)

    def contains(self, assignment: dict) -> bool:
        """True when the assignment is in-bounds for every parameter."""
        if set(assignment) != set(self.names):
            return False
        for p in self.params:
            v = assignment[p.name]
            if isinstance(p, FloatParam):
                if not (isinstance(v, (int, float)) and p.low <= v <= p.high):
                    return False
            elif isinstance(p, IntParam):
                if not (isinstance(v, int) and p.low <= v <= p.high):
                    return False
            elif isinstance(p, CategoricalParam):
                if v not in p.choices:
                    return False
            else:
                if v != p.value:
                    return False
        return True

    def to_dict(self) -> dict:
        out = []
        for p in self.params:
            if isinstance(p, FloatParam):
                out.append({"type": "float", "name": p.name, "low": p.low,
                            "high": p.high, "log_scale": p.log_scale})
            elif isinstance(p, IntParam):
                out.append({"type": "int", "name": p.name, "low": p.low,
                            "high": p.high, "log_scale": p.log_scale})
            elif isinstance(p, CategoricalParam):
                out.append({"type": "categorical", "name": p.name,
                            "choices": list(p.choices)})
            else:
                out.append({"type": "fixed", "name": p.name, "value": p.value})
        doc: dict = {"parameters": out}
        if self.strata:
            doc["strata"] = [
                {"name": s.name, "overrides": dict(s.overrides)} for s in self.strata
            ]
        return doc


def param_from_dict(obj: dict) -> Param:
    kind = obj.get("type")
    if kind == "float":
        return FloatParam(obj["name"], float(obj["low"]), float(obj["high"]),
                          bool(obj.get("log_scale", False)))
    if kind == "int":
        return IntParam(obj["name"], int(obj["low"]), int(obj["high"]),
                        bool(obj.get("log_scale", False)))
    if kind == "categorical":
        return CategoricalParam(obj["name"], tuple(obj["choices"]))
    if kind == "fixed":
        return FixedParam(obj["name"], obj["value"])
    raise ValueError(f"unknown parameter type {kind!r}")


def space_from_dict(doc: dict) -> SearchSpace:
    params = tuple(param_from_dict(p) for p in doc["parameters"])
    strata = tuple(
        Stratum(s["name"], dict(s.get("overrides", {})))
        for s in doc.get("strata", [])
    )
    return SearchSpace(params, strata)


def load_space(path: str | Path) -> SearchSpace:
    with open(path, encoding="utf-8") as fh:
        return space_from_dict(json.load(fh))
