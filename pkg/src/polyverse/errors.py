"""Exception types shared by every module."""

from __future__ import annotations


class PolyError(Exception):
    """Base class for all errors raised by polyverse."""


class IndexOutOfRange(PolyError, IndexError):
    pass


class ShapeMismatch(PolyError, ValueError):
    pass


class PositionOverflow(PolyError, OverflowError):
    """A construction would materialize more positions than the configured bound."""

    def __init__(self, count: int, bound: int, what: str = "polynomial"):
        super().__init__(f"{what} has {count} positions, bound is {bound}")
        self.count = count
        self.bound = bound


class CapExceeded(PolyError):
    """A truncated universe was asked for a code above its cap."""

    def __init__(self, position, value=None, cap=None):
        msg = f"cap exceeded at position {position!r}"
        if value is not None:
            msg += f" (needs code {value}, cap {cap})"
        super().__init__(msg)
        self.position = position
        self.value = value
        self.cap = cap


class PreconditionFailed(PolyError, ValueError):
    pass


class SearchExhausted(PolyError):
    def __init__(self, message: str, bound: int | None = None):
        super().__init__(message)
        self.bound = bound
