"""Exception hierarchy shared by all genderprobe modules.

The CLI maps these onto exit codes: TransportError -> 2, every other
GenderProbeError -> 1.
"""

from __future__ import annotations


class GenderProbeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(GenderProbeError):
    """Input violates a documented precondition or invariant."""


class LexiconParseError(ValidationError):
    """A lexicon or table file is malformed.

    Carries the offending line number when known (1-based, header = line 1).
    """

    def __init__(self, message: str, path: str | None = None, line_no: int | None = None):
        self.path = path
        self.line_no = line_no
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line_no is not None:
            prefix += f":{line_no}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class TransportError(GenderProbeError):
    """A remote backend could not be reached or kept failing after retries."""


class ReplayMissError(GenderProbeError):
    """The replay transcript has no record for the requested key."""


class TranslationError(GenderProbeError):
    """One or more adjectives could not be translated."""

    def __init__(self, tokens: list[str], language: str, detail: str = ""):
        self.tokens = list(tokens)
        self.language = language
        listing = ", ".join(repr(t) for t in self.tokens)
        message = f"untranslatable {language} token(s): {listing}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class TrainingError(GenderProbeError):
    """Classifier training aborted (bad data or diverging loss)."""


class UndefinedSimilarityError(GenderProbeError):
    """A similarity score is undefined (zero score vector)."""


class PoolExhaustionError(ValidationError):
    """A synthetic adjective pool is too small for the requested draw."""
