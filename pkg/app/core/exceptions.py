# app/core/exceptions.py
"""Error types shared by every level set module"""

from typing import Any, Dict, List, Optional, Sequence


class LSEError(Exception):
    """Base class for all errors raised by the level set packages"""

    def to_dict(self) -> Dict[str, Any]:
        return {"type": type(self).__name__, "message": str(self)}


class InvalidArgumentError(LSEError, ValueError):
    """Argument outside an operation's precondition"""


class NumericalFailureError(LSEError):
    """Gram matrix could not be factorized even after jitter escalation"""

    def __init__(self, message: str, smallest_pivot: float):
        super().__init__(f"{message} (smallest pivot {smallest_pivot:.3e})")
        self.smallest_pivot = smallest_pivot

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["smallest_pivot"] = self.smallest_pivot
        return data


class SearchFailureError(LSEError):
    """Every acquisition probe returned a non-finite score"""


class TabularLookupError(LSEError):
    """Query point not present in a tabular dataset"""

    def __init__(self, message: str, nearest: Optional[Sequence[float]] = None,
                 missing: Optional[List[Sequence[float]]] = None):
        super().__init__(message)
        self.nearest = list(nearest) if nearest is not None else None
        self.missing = missing or []

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        if self.nearest is not None:
            data["nearest"] = self.nearest
        return data


class DatasetParseError(LSEError):
    """Tabular dataset could not be parsed"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = ""
        if row is not None:
            location = f" (row {row}" + (f", column '{column}')" if column else ")")
        super().__init__(f"{message}{location}")
        self.row = row
        self.column = column


class ConfigError(LSEError):
    """Experiment configuration failed to parse or validate"""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class OutputDirectoryError(LSEError):
    """Output directory is missing or not writable"""


class IncompleteRunError(LSEError):
    """One or more seeded runs aborted before reaching the budget"""

    def __init__(self, message: str, seeds: Sequence[int] = ()):
        super().__init__(message)
        self.seeds = list(seeds)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["seeds"] = self.seeds
        return data


class InequalityViolationError(LSEError):
    """A convergence inequality failed on a recorded run"""
