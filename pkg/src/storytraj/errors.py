"""Exception hierarchy.

The three mid-level classes map onto CLI exit codes: ConfigError -> 2,
DataError -> 3, SolverError -> 4.
"""


class StorytrajError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(StorytrajError):
    """Invalid configuration or arguments."""

    exit_code = 2


class DataError(StorytrajError):
    """Invalid or inconsistent input data."""

    exit_code = 3


class SolverError(StorytrajError):
    """A numerical or combinatorial solver could not produce a result."""

    exit_code = 4


# corpus

class EmptyCorpusError(DataError):
    """No narrative qualified for the corpus."""


# lsa

class EmptyVocabularyError(DataError):
    """Document-frequency filtering removed every word."""


class SvdConvergenceError(SolverError):
    """The truncated SVD did not converge; carries diagnostics."""

    def __init__(self, message, sweeps=None, last_change=None):
        super().__init__(message)
        self.sweeps = sweeps
        self.last_change = last_change


# embedding interchange files

class InterchangeError(DataError):
    """Malformed embedding interchange file."""


class VersionMismatchError(InterchangeError):
    pass


class MissingPairError(InterchangeError):
    def __init__(self, narrative_id, j):
        super().__init__(f"missing vector for narrative {narrative_id!r}, paragraph {j}")
        self.narrative_id = narrative_id
        self.j = j


class DuplicatePairError(InterchangeError):
    pass


class DimensionMismatchError(InterchangeError):
    pass


class NonFiniteValueError(InterchangeError):
    pass


# mean paths

class IncompleteSetError(DataError):
    """Embedding set does not cover the full (narrative, paragraph) grid."""


class ShapeMismatchError(DataError):
    """Operands disagree on N, n, or dimensionality."""


# graph solvers

class SizeLimitError(SolverError):
    """Instance too large for the exact solver."""


class InvalidPermutationError(DataError):
    """An ordering is not a permutation of 1..n."""
