"""Exception hierarchy shared by every module."""

from __future__ import annotations


class FreqMapError(Exception):
    """Base class for all domain errors raised by freqmap."""


class DimensionError(FreqMapError, ValueError):
    """Inputs disagree in size (candidate counts, matrix shapes)."""


class DomainError(FreqMapError, ValueError):
    """A value lies outside the domain an operation accepts."""


class StructureError(FreqMapError, ValueError):
    """A tree, ranking or election is malformed."""


class UnsupportedDimensionError(DomainError):
    """The requested object is undefined for this number of candidates."""


class ResourceError(FreqMapError, RuntimeError):
    """The request exceeds a documented size cap."""


class ParseError(FreqMapError, ValueError):
    """A file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class UnsupportedFormatError(ParseError):
    """The file is well formed but uses a feature this package does not read."""
