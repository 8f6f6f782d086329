"""Trial execution: subprocess adapter, optimize loop, best-trial selection.

Adapter failures are data, never exceptions: whatever goes wrong inside a
trial (nonzero exit, timeout, unreadable output) becomes a failed/timeout
status in the journal and the loop moves on.
"""
from __future__ import annotations

import subprocess
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import jsonio
from ..errors import NoCompletedTrials, SynthqaError
from ..metrics import POINT_MEAN, evaluate
from ..pareto import pareto_front_indices
from ..schema import Schema
from ..table import TableData, load_csv
from .study import (
    COMPLETED,
    FAILED_SYNTH,
    FAILED_TRAIN,
    MAXIMIZE,
    TIMEOUT_SYNTH,
    TIMEOUT_TRAIN,
    Study,
    Trial,
)


@dataclass
class TrialOutcome:
    status: str
    objectives: tuple[float, ...] | None = None
    train_seconds: float = 0.0
    synth_seconds: float = 0.0


class FunctionAdapter:
    """In-process adapter for tests and benchmarks.

    fn(params) returns the objective value(s); raising or returning None
    counts as a failed training phase.
    """

    def __init__(self, fn):
        self.fn = fn

    def run(self, trial_id: int, params: dict,
            train_timeout: float | None, synth_timeout: float | None) -> TrialOutcome:
        try:
            value = self.fn(params)
        except Exception:
            return TrialOutcome(FAILED_TRAIN)
        if value is None:
            return TrialOutcome(FAILED_TRAIN)
        objectives = tuple(float(v) for v in np.atleast_1d(value))
        return TrialOutcome(COMPLETED, objectives)


class ExternalSynthCommand:
    """Subprocess adapter speaking the two-phase synthesizer contract.

    train: <command> train --real <csv> --schema <json> --params <json> --workdir <dir>
    synth: <command> synth --workdir <dir> --n <count> --out <csv>

    Exit code 0 means success; --params points at a JSON file holding the
    trial's parameter assignment. Each trial gets its own subdirectory under
    workdir, so artifacts survive for audit.
    """

    def __init__(
        self,
        command: list[str],
        real_csv: str | Path,
        schema: Schema,
        schema_path: str | Path,
        workdir: str | Path,
        n_synth: int,
        objectives,
        mode: str = POINT_MEAN,
        n_bins: int = 10,
    ):
        self.command = list(command)
        self.real_csv = Path(real_csv)
        self.schema = schema
        self.schema_path = Path(schema_path)
        self.workdir = Path(workdir)
        self.n_synth = n_synth
        self.objectives = tuple(objectives)
        self.mode = mode
        self.n_bins = n_bins
        self._real: TableData | None = None

    def _real_table(self) -> TableData:
        if self._real is None:
            self._real = load_csv(self.real_csv, self.schema)
        return self._real

    def _run_phase(self, argv: list[str], timeout: float | None) -> tuple[bool, bool, float]:
        """Returns (ok, timed_out, seconds)."""
        start = time.monotonic()
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return False, True, time.monotonic() - start
        except OSError:
            return False, False, time.monotonic() - start
        return proc.returncode == 0, False, time.monotonic() - start

    def run(self, trial_id: int, params: dict,
            train_timeout: float | None, synth_timeout: float | None) -> TrialOutcome:
        wd = self.workdir / f"trial_{trial_id:05d}"
        wd.mkdir(parents=True, exist_ok=True)
        params_path = wd / "params.json"
        jsonio.dump(params, params_path)

        ok, timed_out, train_s = self._run_phase(
            self.command + [
                "train",
                "--real", str(self.real_csv),
                "--schema", str(self.schema_path),
                "--params", str(params_path),
                "--workdir", str(wd),
            ],
            train_timeout,
        )
        if not ok:
            return TrialOutcome(TIMEOUT_TRAIN if timed_out else FAILED_TRAIN,
                                train_seconds=train_s)

        out_csv = wd / "synthetic.csv"
        ok, timed_out, synth_s = self._run_phase(
            self.command + [
                "synth",
                "--workdir", str(wd),
                "--n", str(self.n_synth),
                "--out", str(out_csv),
            ],
            synth_timeout,
        )
        if not ok:
            return TrialOutcome(TIMEOUT_SYNTH if timed_out else FAILED_SYNTH,
                                train_seconds=train_s, synth_seconds=synth_s)

        try:
            synth = load_csv(out_csv, self.schema)
            report = evaluate(self._real_table(), synth,
                              mode=self.mode, n_bins=self.n_bins)
        except (SynthqaError, OSError, ValueError):
            return TrialOutcome(FAILED_SYNTH, train_seconds=train_s, synth_seconds=synth_s)

        values = []
        for obj in self.objectives:
            v = report.metric(obj.metric)
            if v is None:
                return TrialOutcome(FAILED_SYNTH, train_seconds=train_s,
                                    synth_seconds=synth_s)
            values.append(float(v))
        return TrialOutcome(COMPLETED, tuple(values), train_s, synth_s)


def run_trial(study: Study, assignment: dict, adapter) -> Trial:
    """Execute one trial and journal it."""
    outcome = adapter.run(
        study.next_id, assignment, study.train_timeout, study.synth_timeout
    )
    trial = Trial(
        id=study.next_id,
        params=assignment,
        status=outcome.status,
        objectives=outcome.objectives,
        train_seconds=outcome.train_seconds,
        synth_seconds=outcome.synth_seconds,
    )
    study.append(trial)
    return trial


def optimize(study: Study, adapter, on_trial=None) -> Study:
    """Loop suggest/run until the completed-trial count reaches the budget.

    Failures do not consume budget and there is no cap on them; a hopeless
    adapter therefore loops forever by design. on_trial, when given, is
    called after each journaled trial.
    """
    while len(study.completed()) < study.budget:
        assignment = study.suggest_params()
        trial = run_trial(study, assignment, adapter)
        if on_trial is not None:
            on_trial(trial)
    return study


def best(study: Study):
    """Best completed trial (single objective) or the Pareto set (two).

    Single-objective ties go to the earliest trial id. The 2-objective front
    is returned in ascending trial-id order.
    """
    completed = study.completed()
    if not completed:
        raise NoCompletedTrials("study has no completed trials")
    if len(study.objectives) == 1:
        sign = -1.0 if study.objectives[0].direction == MAXIMIZE else 1.0
        return min(completed, key=lambda t: (sign * t.objectives[0], t.id))
    objs = np.array([t.objectives for t in completed])
    front = pareto_front_indices(objs, study.directions)
    return [completed[i] for i in front]
