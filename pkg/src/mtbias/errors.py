"""Exception hierarchy shared across the package.

Operating-system level failures (missing files, permission errors) surface as
the built-in ``OSError``; everything domain-specific derives from
:class:`MtbiasError` so callers can catch one base class at the CLI boundary.
"""

from __future__ import annotations


class MtbiasError(Exception):
    """Base class for all package-specific errors."""


# ---------------------------------------------------------------------------
# Data loading / validation
# ---------------------------------------------------------------------------

class FormatError(MtbiasError):
    """A file or field does not match the expected format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HierarchyError(MtbiasError):
    """A taxonomy code is present without its parent prefix."""


class LevelError(MtbiasError):
    """A truncation level exceeds the length of the code."""


class NotFoundError(MtbiasError):
    """A code was looked up but is not in the taxonomy."""


class UnknownCodeError(MtbiasError):
    """A referenced occupation code does not exist in the taxonomy."""


class DuplicateIdError(MtbiasError):
    """Two corpus samples share an id."""


class RangeError(MtbiasError):
    """A numeric field is outside its allowed range."""


class EmptyCorpusError(MtbiasError):
    """An operation requires at least one sample."""


# ---------------------------------------------------------------------------
# Providers
# ---------------------------------------------------------------------------

class ProviderError(MtbiasError):
    """A translation/judge/embedding provider failed."""

    def __init__(self, message: str, retryable: bool = False):
        self.retryable = retryable
        super().__init__(message)


class UnsupportedLanguageError(MtbiasError):
    """The provider does not support the requested target language."""


class EmptyTextError(MtbiasError):
    """Empty text where non-empty input is required."""


# ---------------------------------------------------------------------------
# Detection protocol
# ---------------------------------------------------------------------------

class ParseError(MtbiasError):
    """A judge reply could not be parsed."""

    def __init__(self, message: str, raw: str | None = None):
        self.raw = raw
        super().__init__(message)


class MissingTitleError(MtbiasError):
    """The gender reply omits an expected occupation title."""


class UnknownLabelError(MtbiasError):
    """A gender label outside the three allowed options."""


class MissingExampleLanguageError(MtbiasError):
    """No few-shot example block is shipped for the requested language."""


class EmptyCandidatesError(MtbiasError):
    """Taxonomy matching was called without candidate codes."""


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

class UndefinedReferenceError(MtbiasError):
    """Reference probability for the requested gender is zero."""


class NoBinaryObservationsError(MtbiasError):
    """No masculine/feminine observations to form a probability."""


class EmptyCountsError(MtbiasError):
    """All counts are zero."""


class LengthMismatchError(MtbiasError):
    """Series lengths are unequal or too short for correlation."""


class ZeroVarianceError(MtbiasError):
    """A correlation input series is constant."""


class InsufficientOverlapError(MtbiasError):
    """Fewer than two shared groups between aligned series."""


# ---------------------------------------------------------------------------
# Pipeline / CLI
# ---------------------------------------------------------------------------

class ConfigError(MtbiasError):
    """Run configuration is invalid or inconsistent."""


class MissingGoldError(MtbiasError):
    """Validation requires gold labels that are absent."""


class IncompleteRunError(MtbiasError):
    """A report was requested on a run directory that is not complete."""
