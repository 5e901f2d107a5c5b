"""Exception hierarchy shared by every module.

Two families matter to callers (and to the CLI exit codes):

* :class:`PreconditionError` and its subclasses mean the inputs were invalid
  and nothing was computed (exit code 2).
* :class:`AmbiguousAtMaxPrecision` means the inputs were valid but a
  certified decision could not be reached within the precision cap
  (exit code 3).
"""

from __future__ import annotations


class DiophError(Exception):
    """Base class for all library errors."""


class PreconditionError(DiophError, ValueError):
    pass


class DomainError(PreconditionError):
    pass


class NotInvertible(PreconditionError):
    pass


class NotCoprime(PreconditionError):
    pass


class EmptyRange(PreconditionError):
    pass


class InvalidQuery(PreconditionError):
    pass


class WorkCapExceeded(PreconditionError):
    pass


class ClosureViolation(PreconditionError):
    pass


class IntegerMultiple(PreconditionError):
    """``h * alpha`` is an integer for some ``h <= H``."""

    def __init__(self, h: int):
        super().__init__(f"IntegerMultiple({h}): {h}*alpha is an integer")
        self.h = h

    def __reduce__(self):
        return (type(self), (self.h,))


class AmbiguousAtMaxPrecision(DiophError):
    """An enclosure could not be separated from a decision boundary.

    ``n`` is filled in by scanning routines so the offending index travels
    with the error.
    """

    def __init__(self, message: str = "enclosure straddles a decision boundary", n: int | None = None):
        super().__init__(message if n is None else f"{message} (n={n})")
        self.n = n
        self._message = message

    def __reduce__(self):
        return (type(self), (self._message, self.n))


class SkippedSmallN(DiophError):
    """``a*floor(n^alpha) + b <= 0``: the reduction does not apply to this n."""


class Violation(DiophError):
    """A proven upper bound came out violated; always an implementation bug."""

    def __init__(self, H: int, count: int, bound: float):
        super().__init__(f"Violation({H}): count {count} exceeds bound {bound!r}")
        self.H = H
        self.count = count
        self.bound = bound

    def __reduce__(self):
        return (type(self), (self.H, self.count, self.bound))


class Condition29Violation(UserWarning):
    """The covering interval fails t(j2) - t(j1) < 2 - t(j2); the instance is still built."""


class ParseError(PreconditionError):
    pass


class ValidationError(PreconditionError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)

    def __reduce__(self):
        return (type(self), (self.problems,))
