"""
Smale alpha-theory certificates and the Koebe-radius duplicate test.
"""
import logging
import math
from dataclasses import dataclass

from .complexpoly import Polynomial, eval_with_derivative, evaluation_error_bound, taylor_coeffs_at
from .errors import DerivativeVanishes, InputError

log = logging.getLogger(__name__)

ALPHA_THRESHOLD = 0.125
DERIVATIVE_FLOOR = 1e-300
# B(r) is increasing on [0, CONTRACTION_LIMIT); past it the Newton contraction bound is useless.
CONTRACTION_LIMIT = 0.148
KOEBE_FACTOR = 3.0


@dataclass(frozen=True)
class AlphaReport:
    alpha: float
    newton_step: complex
    # index k >= 2 attaining gamma; 0 for a linear f, where gamma is 0
    argmax_k: int

    @property
    def certified(self) -> bool:
        return self.alpha < ALPHA_THRESHOLD


def alpha(f: Polynomial, z: complex) -> AlphaReport:
    """
    alpha(f, z) = |c_0/c_1| * max_{k>=2} |c_k/c_1|^{1/(k-1)} with c_k the Taylor
    coefficients at z. The k-th roots are taken in log space.
    """
    c = taylor_coeffs_at(f, z)
    c1 = complex(c[1]) if c.size > 1 else 0j
    if abs(c1) < DERIVATIVE_FLOOR:
        raise DerivativeVanishes(f"|f'({z!r})| = {abs(c1):.3e} is below {DERIVATIVE_FLOOR:g}")

    step = complex(c[0]) / c1
    log_c1 = math.log(abs(c1))
    gamma, best_k = 0.0, 0
    for k in range(2, c.size):
        ck = abs(c[k])
        if ck == 0.0:
            continue
        g = math.exp((math.log(ck) - log_c1) / (k - 1))
        if g > gamma:
            gamma, best_k = g, k
    return AlphaReport(alpha=abs(step) * gamma, newton_step=step, argmax_k=best_k)


def contraction_B(r: float) -> float:
    """B(r) = 2r(1+r)^3/(1-r)^5, the per-step Newton contraction for an alpha-certified start"""
    if not 0.0 <= r < CONTRACTION_LIMIT:
        raise InputError(f"contraction_B is defined on [0, {CONTRACTION_LIMIT}), got {r}")
    return 2.0 * r * (1.0 + r) ** 3 / (1.0 - r) ** 5


def duplicate_radius(psi: Polynomial, candidate: complex) -> float:
    """
    3 |psi(c)| / |psi'(c)|, with |psi(c)| floored at the Horner rounding bound
    so that a candidate sitting on a root still claims a non-empty disk.
    """
    f, df = eval_with_derivative(psi, [candidate])
    slope = abs(complex(df[0]))
    if not math.isfinite(slope) or slope < DERIVATIVE_FLOOR:
        raise DerivativeVanishes(f"psi' vanishes at candidate {candidate!r}")
    value = max(abs(complex(f[0])), evaluation_error_bound(psi, candidate))
    return KOEBE_FACTOR * value / slope


def same_root(psi: Polynomial, accepted: complex, candidate: complex) -> bool:
    """
    True when accepted lies inside the Koebe disk around candidate, so both
    approximate one root. A candidate where psi' vanishes has no disk and is
    reported False; weed rejects such candidates outright.
    """
    try:
        radius = duplicate_radius(psi, candidate)
    except DerivativeVanishes:
        log.debug("no duplicate disk around %r: derivative vanishes", candidate)
        return False
    return abs(accepted - candidate) < radius
