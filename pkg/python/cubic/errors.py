"""Exception types raised by the cubic-code toolkit.

Each family carries the CLI exit status it maps to in ``exit_code``.
"""

from typing import Any, Iterable, Optional, Tuple


class CubicError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(CubicError):
    """Malformed configuration file, faces string or defect record."""

    exit_code = 2


class DimensionError(CubicError, ValueError):
    """Vector, word or matrix sizes do not agree."""

    exit_code = 4


class BuildError(CubicError):
    """Geometry or defect layout cannot be realised on the lattice."""

    exit_code = 3


class CommutationError(BuildError):
    """Two generators of a stabilizer set anticommute."""

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None, anchors: Optional[Tuple[Any, Any]] = None):
        super().__init__(message)
        self.pair = pair
        self.anchors = anchors


class ClippedSupportError(BuildError):
    """An operator's support falls off an open face or into a removed site."""

    def __init__(self, message: str, sites: Iterable[Tuple[int, int, int]] = ()):
        super().__init__(message)
        self.sites = list(sites)


class PreconditionError(CubicError):
    """Analysis called on an input outside its domain."""

    exit_code = 4


