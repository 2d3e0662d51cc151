"""Exception types shared across the package."""


class KappaZeroError(Exception):
    """Base class for all package errors."""


class IntervalDomainError(KappaZeroError, ValueError):
    """An interval operation was applied outside its domain
    (division by an interval containing zero, log of an interval
    reaching zero, ...)."""


class ZeroTableError(KappaZeroError, ValueError):
    """A zero table failed parsing or validation; carries the offending
    line number when one is known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class CertificationError(KappaZeroError):
    """A rigorous check failed.  `stage` names the pipeline stage, and
    `details` carries indices and interval endpoints for diagnosis."""

    def __init__(self, stage: str, message: str, **details):
        self.stage = stage
        self.details = details
        extra = ", ".join(f"{k}={v}" for k, v in details.items())
        super().__init__(f"[{stage}] {message}" + (f" ({extra})" if extra else ""))


class HeuristicFailure(KappaZeroError):
    """The lattice reduction heuristic hit a degenerate state (zero vector
    or zero Gram-Schmidt norm), typically from rationally dependent input."""
