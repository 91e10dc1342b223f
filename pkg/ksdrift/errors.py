"""Exception hierarchy shared by the library and the command-line front end."""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Union


class KsDriftError(Exception):
    """Base class for every error raised by ksdrift."""


class InvalidInputError(KsDriftError, ValueError):
    """An argument is outside its documented domain."""


class EmptySampleError(InvalidInputError):
    """A sample (or every partition of one) holds no values."""


class InvalidDataError(InvalidInputError):
    """A sample entry is not a finite real number."""

    def __init__(self, index: int, value: object, message: Optional[str] = None) -> None:
        self.index = index
        self.value = value
        super().__init__(message or f"non-finite value {value!r} at index {index}")


class DataSourceError(KsDriftError, OSError):
    """A file could not be read, or an output file could not be written."""

    def __init__(self, path: Union[str, Path], reason: str, action: str = "read") -> None:
        self.path = Path(path)
        self.reason = reason
        self.action = action
        super().__init__(f"cannot {action} {self.path}: {reason}")


class DataFormatError(KsDriftError):
    """An input file was readable but its content could not be parsed."""

    def __init__(self, path: Union[str, Path], line_number: int, reason: str) -> None:
        self.path = Path(path)
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"{self.path}:{line_number}: {reason}")


__all__ = [
    "DataFormatError",
    "DataSourceError",
    "EmptySampleError",
    "InvalidDataError",
    "InvalidInputError",
    "KsDriftError",
]
