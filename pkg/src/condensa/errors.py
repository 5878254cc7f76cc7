"""Exception hierarchy shared by every condensa module."""

from __future__ import annotations


class CondensaError(Exception):
    """Base class for all library errors."""


class FormatError(CondensaError):
    """A file does not follow its declared line format."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class EmptySetError(CondensaError, ValueError):
    """Overlap coefficient requested for an empty stem set."""


class NoConvergenceError(CondensaError, ArithmeticError):
    """The Jacobi SVD exceeded its sweep limit."""


class DegenerateDocumentError(CondensaError):
    """Document has too few usable sentences to build an LSA space."""


class SentenceIndexError(CondensaError, IndexError):
    """Sentence index outside the range of an LSA space."""


class InvalidStatsError(CondensaError, ValueError):
    """Inconsistent term statistics passed to the tf-idf weighting."""


class DuplicateDocIdError(CondensaError, ValueError):
    pass


class EmptyCorpusError(CondensaError, ValueError):
    pass


class EmptyCorpusDirError(CondensaError):
    pass


class EmptyRelevantSetError(CondensaError, ValueError):
    pass


class NoQueriesError(CondensaError, ValueError):
    pass


class ConfigError(CondensaError, ValueError):
    """Invalid analyzer, extractor or experiment configuration."""
