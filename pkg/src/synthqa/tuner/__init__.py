"""Hyperparameter tuning for external synthesizer commands."""
from .runner import (
    ExternalSynthCommand,
    FunctionAdapter,
    TrialOutcome,
    best,
    optimize,
    run_trial,
)
from .space import (
    CategoricalParam,
    FixedParam,
    FloatParam,
    IntParam,
    SearchSpace,
    Stratum,
    load_space,
)
from .study import Objective, Study, Trial, objectives_for_schema
from .tpe import suggest

__all__ = [
    "CategoricalParam",
    "ExternalSynthCommand",
    "FixedParam",
    "FloatParam",
    "FunctionAdapter",
    "IntParam",
    "Objective",
    "SearchSpace",
    "Stratum",
    "Study",
    "Trial",
    "TrialOutcome",
    "best",
    "load_space",
    "objectives_for_schema",
    "optimize",
    "run_trial",
    "suggest",
]
