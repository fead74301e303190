"""
Fourier transforms on the (n+1)-st roots of unity and interpolation-based deflation.

dft evaluates a coefficient vector at the roots of unity, idft recovers the
coefficients. Both are normalized so that idft(dft(x)) == x.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .complexpoly import (
    Polynomial,
    PointsLike,
    as_points,
    eval_many,
    expand_factors,
    max_norm,
)
from .errors import InputError, NodeCollision

log = logging.getLogger(__name__)


def dft(values: PointsLike) -> np.ndarray:
    """out_j = sum_k values_k w^{jk}, w = e^{2 pi i/(n+1)}"""
    x = as_points(values)
    if x.size == 0:
        raise InputError("dft needs at least one value")
    # numpy's inverse transform carries the positive exponent and a 1/N factor
    return x.size * np.fft.ifft(x)


def idft(values: PointsLike) -> np.ndarray:
    """out_k = 1/(n+1) sum_j values_j w^{-jk}"""
    y = as_points(values)
    if y.size == 0:
        raise InputError("idft needs at least one value")
    return np.fft.fft(y) / y.size


@dataclass(frozen=True, eq=False)
class DeflationResult:
    quotient: Polynomial
    divisor: Polynomial
    remainder_norm: float
    rotations: int = 0
    leading_correction: float = 0.0


def rotation_angle(k: int, n: int) -> float:
    """k-th fallback rotation of the interpolation nodes"""
    return math.pi * k / (7.0 * (n + 1))


def deflate(
    psi: Polynomial,
    v: PointsLike,
    collision_threshold: float = 1e-13,
    max_rotations: int = 8,
    strategy: str = 'horner',
) -> DeflationResult:
    """
    Divide the factor prod (z - v_k) out of psi by interpolating psi/p at the
    (n+1)-st roots of unity, n = deg psi - #v. When p nearly vanishes at a node
    the nodes are rotated by e^{i theta} and the rotation is undone per coefficient.
    """
    roots = as_points(v)
    d = psi.degree
    if roots.size >= d:
        raise InputError(f"cannot deflate {roots.size} roots out of a degree-{d} polynomial")
    if not psi.is_monic():
        raise InputError("deflate expects a monic polynomial")

    n = d - roots.size
    divisor = expand_factors(roots)
    unit_nodes = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))

    for k in range(max_rotations + 1):
        theta = rotation_angle(k, n) if k else 0.0
        nodes = np.exp(1j * theta) * unit_nodes
        p_values = eval_many(divisor, nodes, strategy)
        magnitudes = np.abs(p_values)
        if magnitudes.min() >= collision_threshold * magnitudes.max():
            break
        log.warning("deflation node collision, rotating nodes (attempt %d, n=%d)", k + 1, n)
    else:
        raise NodeCollision(
            f"divisor vanishes at an interpolation node after {max_rotations} rotations"
        )

    interpolated = idft(eval_many(psi, nodes, strategy) / p_values)
    coeffs = interpolated * np.exp(-1j * theta * np.arange(n + 1))
    lead = coeffs[-1]
    quotient = Polynomial(coeffs / lead)
    remainder = max_norm(psi - divisor * quotient)
    return DeflationResult(
        quotient=quotient,
        divisor=divisor,
        remainder_norm=remainder,
        rotations=k,
        leading_correction=float(abs(lead - 1.0)),
    )
