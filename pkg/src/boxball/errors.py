"""Shared exception types."""


class BoxBallError(Exception):
    """Base class for all library errors."""


class DomainError(BoxBallError):
    """An operation was applied outside its domain of definition."""


class UndecidableError(BoxBallError):
    """The answer depends on data outside the stored window."""


class MalformedPathError(BoxBallError):
    """A path violates the unit-step / anchoring structure."""
