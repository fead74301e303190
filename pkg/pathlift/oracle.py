"""
Reference root solver for cross-checking: Aberth-Ehrlich simultaneous iteration.
Shares nothing with the path-lifting pipeline beyond polynomial evaluation.
"""
import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .complexpoly import (
    SCALAR_DTYPE,
    Polynomial,
    PointsLike,
    as_points,
    eval_many,
    eval_with_derivative,
    evaluation_error_bounds,
    max_norm,
    root_radius_bound,
)
from .errors import InputError, NoConvergence

log = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-13
ORACLE_MAX_SWEEPS = 500
# golden-angle offset keeps the start circle off any symmetry axis of the input
START_OFFSET = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class OracleResult:
    roots: np.ndarray
    max_backward_error: float
    iterations: int


def oracle_roots(
    p: Polynomial,
    tol: float = ORACLE_TOLERANCE,
    max_sweeps: int = ORACLE_MAX_SWEEPS,
    strategy: str = 'horner',
) -> OracleResult:
    d = p.degree
    if d < 1:
        raise InputError("oracle_roots needs degree >= 1")
    monic = Polynomial(p.coeffs / p.coeffs[-1])
    radius = 0.9 * root_radius_bound(monic)
    if radius == 0.0:
        return OracleResult(np.zeros(d, dtype=SCALAR_DTYPE), 0.0, 0)

    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(d) / d + START_OFFSET))
    for sweep in range(1, max_sweeps + 1):
        f, df = eval_with_derivative(monic, z)
        settled = np.abs(f) <= evaluation_error_bounds(monic, z)
        gaps = z[:, None] - z[None, :]
        np.fill_diagonal(gaps, np.inf)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            repulsion = np.sum(1.0 / gaps, axis=1)
            ratio = f / df
            update = ratio / (1.0 - ratio * repulsion)
        update[settled] = 0.0
        stuck = ~np.isfinite(update)
        if stuck.any():
            # flat spot or coincident estimates: nudge off it
            update[stuck] = 1e-3 * radius * np.exp(1j * (sweep + np.flatnonzero(stuck)))
        z = z - update
        if np.max(np.abs(update)) < tol * max(1.0, float(np.max(np.abs(z)))):
            break
    else:
        raise NoConvergence(f"Aberth iteration did not settle in {max_sweeps} sweeps", sweeps=max_sweeps)

    backward = float(np.max(np.abs(eval_many(monic, z, strategy)))) / max_norm(monic)
    log.debug("oracle: degree %d in %d sweeps, backward error %.2e", d, sweep, backward)
    return OracleResult(roots=z, max_backward_error=backward, iterations=sweep)


def _has_perfect_matching(adjacent: np.ndarray) -> bool:
    """Kuhn's augmenting paths on a square boolean adjacency matrix"""
    n = adjacent.shape[0]
    owner: List[int] = [-1] * n

    def augment(row: int, seen: List[bool]) -> bool:
        for col in np.flatnonzero(adjacent[row]):
            if seen[col]:
                continue
            seen[col] = True
            if owner[col] < 0 or augment(owner[col], seen):
                owner[col] = row
                return True
        return False

    return all(augment(row, [False] * n) for row in range(n))


def match_multisets(a: PointsLike, b: PointsLike) -> float:
    """min over permutations pi of max_j |a_j - b_pi(j)| (bottleneck assignment)"""
    left, right = as_points(a), as_points(b)
    if left.size != right.size:
        raise InputError(f"cannot match multisets of sizes {left.size} and {right.size}")
    if left.size == 0:
        return 0.0
    distances = np.abs(left[:, None] - right[None, :])
    candidates = np.unique(distances)
    lo, hi = 0, candidates.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(distances <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])
