"""Exception types shared across the toolkit."""


class NomaError(Exception):
    """Base class for domain errors raised by nomakit."""


class InfeasibleError(NomaError, ValueError):
    """A problem instance has no solution (e.g. a beam cannot satisfy the SIC ordering)."""
