"""Exception types shared across the package."""


class LevelTextError(Exception):
    """Base class for all package errors."""


class EmptyTextError(LevelTextError, ValueError):
    """Raised when an operation needs at least one sentence or token."""


class UnscorableError(LevelTextError, ValueError):
    """Raised when a text cannot be scored (empty or sentence-free)."""


class CalibrationError(LevelTextError, ValueError):
    """Raised when a calibration set cannot support a least-squares fit."""


class CorpusError(LevelTextError, ValueError):
    """Raised on malformed or inconsistent corpus input."""


class ProviderConfigError(LevelTextError, ValueError):
    """Raised before any network call when a provider is misconfigured."""


class ProviderError(LevelTextError):
    """Raised by the embedding client on wire-contract violations."""


class MergeConflictError(LevelTextError):
    """Raised when a merge would touch a locked span or overlap itself.

    ``link_ids`` lists the offending replacement links; nothing is applied.
    """

    def __init__(self, message: str, link_ids: list[int]):
        super().__init__(message)
        self.link_ids = list(link_ids)


class UnknownRunError(LevelTextError, KeyError):
    """Raised when a run id is not present in the workspace."""
