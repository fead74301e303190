"""Certified epsilon-factorization of complex polynomials by path lifting."""
__version__ = "0.1.0"

from .complexpoly import Polynomial  # noqa: E402
from .config import SolveConfig  # noqa: E402
from .lifter import Factorization, solve  # noqa: E402

__all__ = ['Factorization', 'Polynomial', 'SolveConfig', 'solve', '__version__']
