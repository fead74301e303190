"""
Exception hierarchy for pathlift.
Library code raises these; cli.py maps them to exit codes, api.py to HTTP statuses.
"""
from typing import Any, Dict, List, Optional


class PathLiftError(Exception):
    """Base class for every error raised by the solver"""


class InputError(PathLiftError):
    """Malformed polynomial, epsilon or flag combination"""


class EvaluationOverflow(PathLiftError):
    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class TauUnderflow(PathLiftError):
    """tau fell below the precision floor of the scalar type"""


class DegreeGuardExceeded(TauUnderflow):
    pass


class DerivativeVanishes(PathLiftError):
    pass


class NodeCollision(PathLiftError):
    pass


class InsufficientCrossings(PathLiftError):
    def __init__(self, ray_index: int, found: int, expected: int):
        super().__init__(
            f"ray {ray_index}: found {found} probe crossings, expected {expected}"
        )
        self.ray_index = ray_index
        self.found = found
        self.expected = expected


class TheoremViolation(PathLiftError):
    """
    No quadrant produced half of the roots. The covering argument says this
    cannot happen in exact arithmetic, so reaching it means a precision failure.
    """

    def __init__(self, message: str, stats: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message)
        self.stats = stats or []


class NoConvergence(PathLiftError):
    def __init__(self, message: str, sweeps: int):
        super().__init__(message)
        self.sweeps = sweeps
