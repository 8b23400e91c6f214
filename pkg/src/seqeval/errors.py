"""Exception types shared across the toolkit."""


class SeqevalError(Exception):
    """Base class for all toolkit errors."""


class ScoringInputError(SeqevalError, ValueError):
    """Hypotheses/references violate a scoring precondition (lengths, emptiness)."""


class UndefinedReferenceError(ScoringInputError):
    """All references for an example are empty where a metric needs length."""


class UnknownScorerError(SeqevalError, LookupError):
    """A metric id is not present in the registry."""


class DuplicateScorerError(SeqevalError, ValueError):
    """A metric id was registered twice."""


class DataLayoutError(SeqevalError):
    """An on-disk eval set violates the layout contract.

    ``violations`` holds the individual findings.
    """

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class UnsafeArchiveError(SeqevalError):
    """An uploaded archive contains unsafe member paths."""


class IngestError(SeqevalError):
    """An uploaded archive failed integrity checks; nothing was installed."""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])
