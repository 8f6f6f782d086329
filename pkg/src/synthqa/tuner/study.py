"""Study state: objectives, budget, and the append-only trial journal.

The budget counts completed trials only. Failed and timed-out trials are
journaled for audit but carry no objectives and are invisible to the
optimizer, which may therefore run an unbounded number of attempts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .. import jsonio
from ..schema import CATEGORICAL, NUMERICAL, Schema
from .space import SearchSpace
from .tpe import suggest

COMPLETED = "completed"
FAILED_TRAIN = "failed_train"
FAILED_SYNTH = "failed_synth"
TIMEOUT_TRAIN = "timeout_train"
TIMEOUT_SYNTH = "timeout_synth"
STATUSES = (COMPLETED, FAILED_TRAIN, FAILED_SYNTH, TIMEOUT_TRAIN, TIMEOUT_SYNTH)

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


@dataclass(frozen=True)
class Objective:
    metric: str
    direction: str

    def __post_init__(self):
        if self.direction not in (MINIMIZE, MAXIMIZE):
            raise ValueError(f"direction must be minimize or maximize, got {self.direction!r}")

    def to_dict(self) -> dict:
        return {"metric": self.metric, "direction": self.direction}


def objectives_for_schema(schema: Schema) -> tuple[Objective, ...]:
    """Objective selection by column mix.

    Pairwise metrics need two columns of a kind, so: >=2 categorical gives
    MAE2 down, >=2 numerical gives Hist_IoU2 up, both gives both (2-objective
    study). Schemas with at most one column of each kind fall back to the
    degree-1 counterparts.
    """
    out = []
    if len(schema.names_of_kind(CATEGORICAL)) >= 2:
        out.append(Objective("mae2", MINIMIZE))
    if len(schema.names_of_kind(NUMERICAL)) >= 2:
        out.append(Objective("hist_iou2", MAXIMIZE))
    if not out:
        if schema.names_of_kind(CATEGORICAL):
            out.append(Objective("mae1", MINIMIZE))
        else:
            out.append(Objective("hist_iou1", MAXIMIZE))
    return tuple(out)


@dataclass
class Trial:
    id: int
    params: dict
    status: str
    objectives: tuple[float, ...] | None = None
    train_seconds: float = 0.0
    synth_seconds: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown trial status {self.status!r}")
        if (self.objectives is not None) != (self.status == COMPLETED):
            raise ValueError("objectives must be present exactly for completed trials")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "params": dict(self.params),
            "status": self.status,
            "objectives": None if self.objectives is None else list(self.objectives),
            "train_seconds": self.train_seconds,
            "synth_seconds": self.synth_seconds,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Trial":
        objs = doc.get("objectives")
        return cls(
            id=int(doc["id"]),
            params=dict(doc["params"]),
            status=doc["status"],
            objectives=None if objs is None else tuple(float(v) for v in objs),
            train_seconds=float(doc.get("train_seconds", 0.0)),
            synth_seconds=float(doc.get("synth_seconds", 0.0)),
        )


@dataclass
class Study:
    space: SearchSpace
    objectives: tuple[Objective, ...]
    budget: int
    seed: int = 0
    train_timeout: float | None = None
    synth_timeout: float | None = None
    journal_path: Path | None = None
    trials: list[Trial] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= len(self.objectives) <= 2:
            raise ValueError("a study needs 1 or 2 objectives")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.journal_path is not None:
            self.journal_path = Path(self.journal_path)

    @property
    def directions(self) -> tuple[str, ...]:
        return tuple(o.direction for o in self.objectives)

    def completed(self) -> list[Trial]:
        return [t for t in self.trials if t.status == COMPLETED]

    @property
    def next_id(self) -> int:
        return len(self.trials)

    def suggest_params(self) -> dict:
        history = [(t.params, t.objectives) for t in self.completed()]
        return suggest(self.space, history, self.seed, self.directions)

    def append(self, trial: Trial) -> None:
        """Record a trial; the journal line is flushed before returning."""
        if trial.id != len(self.trials):
            raise ValueError(f"trial id {trial.id} out of order")
        self.trials.append(trial)
        if self.journal_path is not None:
            with open(self.journal_path, "a", encoding="utf-8") as fh:
                fh.write(jsonio.dumps(trial.to_dict(), indent=None) + "\n")
                fh.flush()

    def load_journal(self) -> int:
        """Read existing journal lines into memory; returns the trial count."""
        if self.journal_path is None or not self.journal_path.exists():
            return 0
        self.trials = []
        with open(self.journal_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self.trials.append(Trial.from_dict(json.loads(line)))
        return len(self.trials)


def load_study_config(path: str | Path) -> dict:
    """Study config JSON: budget, timeouts (seconds), seed, objectives."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    out = {
        "budget": int(doc["budget"]),
        "seed": int(doc.get("seed", 0)),
        "train_timeout": doc.get("train_timeout"),
        "synth_timeout": doc.get("synth_timeout"),
    }
    if "objectives" in doc:
        out["objectives"] = tuple(
            Objective(o["metric"], o["direction"]) for o in doc["objectives"]
        )
    return out
