"""Exception types shared across the package.

DomainError marks mathematically invalid inputs (subcritical intensity where
a moment diverges, even dimension for the residue route, points outside the
sampled ball).  ConvergenceError marks a numeric routine that ran out of
budget; it carries the best estimate so callers can still inspect it.
"""


class DomainError(ValueError):
    """Input outside the mathematical domain of the requested quantity."""


class ConvergenceError(RuntimeError):
    """Numeric routine failed its accuracy target.

    best holds the last estimate (float, complex, or QuadResult) or None.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
