"""
Orbital - Errors

Exception hierarchy shared by every module. The CLI maps each family
to its own exit code.
"""

from typing import Optional


class OrbitalError(Exception):
    """Base class for all errors raised by orbital."""


class ParseError(OrbitalError, ValueError):
    """Malformed input text, with 1-based line and column when known."""

    def __init__(self, message: str, line: Optional[int] = None, position: Optional[int] = None):
        self.line = line
        self.position = position
        location = []
        if line is not None:
            location.append(f"line {line}")
        if position is not None:
            location.append(f"position {position}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class SizeMismatchError(OrbitalError, ValueError):
    """Two objects that must share a domain size do not."""


class ScaleGuardError(OrbitalError):
    """An exhaustive computation would exceed its configured limit."""

    def __init__(self, guard: str, limit: int, observed: Optional[int] = None):
        self.guard = guard
        self.limit = limit
        self.observed = observed
        detail = f"{guard} exceeds limit {limit}"
        if observed is not None:
            detail += f" (reached {observed})"
        super().__init__(detail)


class ContractError(OrbitalError, ValueError):
    """A documented precondition was violated by the caller."""


class ConsistencyError(OrbitalError):
    """An internal invariant failed; indicates a bug upstream."""


class NotConvergedError(OrbitalError):
    """Mixing time search hit its step cap without reaching the threshold."""

    def __init__(self, cap: int, distance: float):
        self.cap = cap
        self.distance = distance
        super().__init__(f"not converged after {cap} steps (distance {distance:.3g})")
