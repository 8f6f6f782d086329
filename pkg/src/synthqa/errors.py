"""Exception types raised across the toolkit.

Class names double as the error vocabulary used in reports and CLI
diagnostics, so they are nouns rather than the usual ``*Error`` style.
"""


class SynthqaError(Exception):
    """Base class for all toolkit errors."""


class MissingColumn(SynthqaError):
    """A schema column is absent from a CSV header."""


class ParseError(SynthqaError):
    """A cell could not be parsed; carries row/column location."""

    def __init__(self, message: str, *, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyFile(SynthqaError):
    """The input file has no header row."""


class SchemaMismatch(SynthqaError):
    """Two tables do not share the same schema."""


class BadTuple(SynthqaError):
    """A variable tuple addresses a column the operation cannot use."""


class EmptyTable(SynthqaError):
    """A marginal table has no cells."""


class EmptyList(SynthqaError):
    """An aggregate was requested over zero marginal tables."""


class NoRealSupport(SynthqaError):
    """Coverage is undefined: no cell has real support."""


class EmptySynth(SynthqaError):
    """Invented is undefined: the synthetic side has no rows."""


class EmptyColumn(SynthqaError):
    """A numeric operation received no values."""


class EmptySeries(SynthqaError):
    """A QQ plot was requested with no series."""


class UnknownColumn(SynthqaError):
    """A rule references a column absent from the schema."""


class InvalidRule(SynthqaError):
    """A rule definition is malformed or cannot be applied."""


class MixedDatasets(SynthqaError):
    """Ranking inputs do not share a dataset id."""


class ModelSetMismatch(SynthqaError):
    """Rankings to compare cover different model sets."""


class NoCompletedTrials(SynthqaError):
    """A best-trial query ran against a journal with no completed trials."""
