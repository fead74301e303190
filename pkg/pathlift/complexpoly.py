"""
Dense complex polynomials: evaluation, derivatives, norms, root-radius bounds
and the two rescalings used by the solver (P_d(1) membership and the K-rescale
that moves every root into the disk of radius 1/2).

Coefficients are stored in ascending order a_0..a_d as complex128 numpy arrays.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import DEFAULT_MAX_DEGREE, DEFAULT_TAU_FLOOR
from .errors import DegreeGuardExceeded, EvaluationOverflow, InputError, TauUnderflow

log = logging.getLogger(__name__)

# Single point of change for the scalar backend.
SCALAR_DTYPE = np.complex128
ComplexScalar = complex
PointsLike = Union[Sequence[complex], np.ndarray]

UNIT_ROUNDOFF = float(np.finfo(np.float64).eps) / 2.0
MONIC_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Polynomial:
    """phi(z) = sum a_j z^j, trailing zeros trimmed so a_d != 0 (except for the zero polynomial)"""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=SCALAR_DTYPE, ndmin=1)
        if c.ndim != 1 or c.size == 0:
            raise InputError("coefficient vector must be one-dimensional and nonempty")
        if not np.all(np.isfinite(c)):
            raise InputError("coefficients must be finite")
        nonzero = np.flatnonzero(c)
        c = c[: nonzero[-1] + 1] if nonzero.size else c[:1]
        c.setflags(write=False)
        object.__setattr__(self, 'coeffs', c)

    @classmethod
    def from_roots(cls, roots: PointsLike) -> 'Polynomial':
        return expand_factors(roots)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def is_monic(self, tol: float = MONIC_TOLERANCE) -> bool:
        return abs(self.leading - 1.0) <= tol

    def __call__(self, z: complex) -> complex:
        return evaluate(self, z)

    def __sub__(self, other: 'Polynomial') -> 'Polynomial':
        return Polynomial(_padded(self.coeffs, other.coeffs, np.subtract))

    def __add__(self, other: 'Polynomial') -> 'Polynomial':
        return Polynomial(_padded(self.coeffs, other.coeffs, np.add))

    def __mul__(self, other: 'Polynomial') -> 'Polynomial':
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def __repr__(self) -> str:
        terms = ', '.join(f"{complex(a):.6g}" for a in self.coeffs)
        return f"Polynomial([{terms}])"


def _padded(a: np.ndarray, b: np.ndarray, op) -> np.ndarray:
    n = max(a.size, b.size)
    left = np.zeros(n, dtype=SCALAR_DTYPE)
    right = np.zeros(n, dtype=SCALAR_DTYPE)
    left[: a.size] = a
    right[: b.size] = b
    return op(left, right)


def subtract_constant(p: Polynomial, c: complex) -> Polynomial:
    """p(z) - c"""
    coeffs = p.coeffs.copy()
    coeffs[0] -= c
    return Polynomial(coeffs)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full(z.shape, coeffs[-1], dtype=SCALAR_DTYPE)
    with np.errstate(over='ignore', invalid='ignore'):
        for a in coeffs[-2::-1]:
            acc = acc * z + a
    return acc


def _numpy_polyval(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    with np.errstate(over='ignore', invalid='ignore'):
        return np.asarray(npoly.polyval(z, coeffs), dtype=SCALAR_DTYPE)


# Multipoint evaluation strategies; all share the contract of eval_many.
EVALUATORS: Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    'horner': _horner,
    'numpy': _numpy_polyval,
}


def as_points(points: PointsLike) -> np.ndarray:
    return np.asarray(points, dtype=SCALAR_DTYPE).reshape(-1)


def evaluate(p: Polynomial, z: complex) -> complex:
    """Horner evaluation at one point"""
    value = complex(_horner(p.coeffs, np.asarray(z, dtype=SCALAR_DTYPE)))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise EvaluationOverflow(f"non-finite value of degree-{p.degree} polynomial at {z!r}")
    return value


def eval_many(p: Polynomial, points: PointsLike, strategy: str = 'horner') -> np.ndarray:
    """Evaluate p at every point, preserving order. Raises on the first non-finite value."""
    try:
        evaluator = EVALUATORS[strategy]
    except KeyError:
        raise InputError(f"unknown evaluation strategy {strategy!r}") from None
    z = as_points(points)
    if z.size == 0:
        return np.zeros(0, dtype=SCALAR_DTYPE)
    values = evaluator(p.coeffs, z)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        index = int(bad[0])
        raise EvaluationOverflow(f"non-finite value at point index {index}", index=index)
    return values


def eval_with_derivative(p: Polynomial, points: PointsLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    p and p' at every point in a single Horner pass.
    Non-finite results are returned as-is; callers decide what a lost point means.
    """
    z = as_points(points)
    f = np.full(z.shape, p.coeffs[-1], dtype=SCALAR_DTYPE)
    df = np.zeros(z.shape, dtype=SCALAR_DTYPE)
    with np.errstate(over='ignore', invalid='ignore'):
        for a in p.coeffs[-2::-1]:
            df = df * z + f
            f = f * z + a
    return f, df


def evaluation_error_bounds(p: Polynomial, points: PointsLike) -> np.ndarray:
    """Running rounding bound of Horner's rule, 2 d u sum |a_j| |z|^j, at every point"""
    d = max(p.degree, 1)
    z = np.abs(as_points(points)).astype(SCALAR_DTYPE)
    magnitude = _horner(np.abs(p.coeffs).astype(SCALAR_DTYPE), z)
    return 2.0 * d * UNIT_ROUNDOFF * np.abs(magnitude)


def evaluation_error_bound(p: Polynomial, z: complex) -> float:
    return float(evaluation_error_bounds(p, [z])[0])


def derivative(p: Polynomial) -> Polynomial:
    if p.degree == 0:
        return Polynomial([0.0])
    return Polynomial(p.coeffs[1:] * np.arange(1, p.degree + 1))


def taylor_coeffs_at(p: Polynomial, z: complex) -> np.ndarray:
    """
    c_k = p^(k)(z)/k! for k = 0..d, by repeated synthetic division.
    c_0 is p(z) and c_1 is p'(z).
    """
    work = [complex(a) for a in p.coeffs[::-1]]  # descending
    n = len(work)
    for k in range(n - 1):
        for i in range(1, n - k):
            work[i] += z * work[i - 1]
    c = np.array(work[::-1], dtype=SCALAR_DTYPE)
    if not np.all(np.isfinite(c)):
        raise EvaluationOverflow(f"non-finite Taylor coefficient of degree-{p.degree} polynomial at {z!r}")
    return c


# ---------------------------------------------------------------------------
# Norms and bounds
# ---------------------------------------------------------------------------

def max_norm(p: Polynomial) -> float:
    return float(np.max(np.abs(p.coeffs)))


def _coefficient_radius(p: Polynomial) -> float:
    """max_{j<d} |a_j/a_d|^{1/(d-j)}, or 0 when every lower coefficient vanishes"""
    d = p.degree
    ratios = np.abs(p.coeffs[:-1] / p.coeffs[-1])
    exponents = 1.0 / (d - np.arange(d))
    mask = ratios > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(np.power(ratios[mask], exponents[mask])))


def root_radius_bound(p: Polynomial) -> float:
    """
    Every root lies in the open disk of the returned radius. A return of 0 means
    all lower coefficients vanish, so every root sits at the origin.
    """
    if p.degree < 1:
        raise InputError("root_radius_bound needs degree >= 1")
    return 2.0 * _coefficient_radius(p)


def in_pd1(p: Polynomial, slack: float = MONIC_TOLERANCE) -> bool:
    """Monic with every lower coefficient of modulus at most 1"""
    if p.degree < 1 or not p.is_monic(slack):
        return False
    return bool(np.all(np.abs(p.coeffs[:-1]) <= 1.0 + slack))


def _rescaled(p: Polynomial, scale: float) -> np.ndarray:
    """coefficients of p(scale z)/(a_d scale^d)"""
    d = p.degree
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        factors = np.power(scale, np.arange(d + 1) - d, dtype=np.float64)
        coeffs = (p.coeffs / p.coeffs[-1]) * factors
    coeffs[-1] = 1.0
    if not np.all(np.isfinite(coeffs)):
        raise InputError(f"rescaling by {scale:g} leaves the representable range")
    return coeffs


def normalize_to_pd1(p: Polynomial) -> Tuple[Polynomial, float]:
    """
    Returns (q, B) with q = p(Bz)/(a_d B^d) in P_d(1); roots of p are B times roots of q.
    """
    if p.is_zero:
        raise InputError("cannot normalize the zero polynomial")
    if p.degree < 1:
        raise InputError("normalize_to_pd1 needs degree >= 1")
    scale = _coefficient_radius(p)
    if scale == 0.0:
        scale = 1.0
    return Polynomial(_rescaled(p, scale)), scale


@dataclass(frozen=True, eq=False)
class NormalizedInput:
    f0: Polynomial
    K: float
    original_degree: int


def _log_tau(epsilon: float, K: float, d: int) -> float:
    return math.log(epsilon) - math.log(2.0) - d * math.log(K) + (d + 3) * math.log(4.0 / 7.0)


def tau_for(epsilon: float, K: float, d: int) -> float:
    """tau = (eps / 2K^d)(4/7)^{d+3}"""
    try:
        return epsilon / (2.0 * K ** d) * (4.0 / 7.0) ** (d + 3)
    except OverflowError:
        return math.exp(_log_tau(epsilon, K, d))


def rescale_main(
    phi: Polynomial,
    eps: float,
    assume_pd1: bool = False,
    tau_floor: float = DEFAULT_TAU_FLOOR,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> Tuple[NormalizedInput, float]:
    """
    f0(z) = phi(Kz)/K^d with K = 4 max|a_j|^{1/(d-j)}, so every root of f0 lies in D_{1/2}.
    With assume_pd1 the input must be in P_d(1) and K = 4, giving tau = 32 eps / 7^{d+3}.
    """
    if not eps > 0:
        raise InputError(f"epsilon must be positive, got {eps}")
    d = phi.degree
    if d < 1:
        raise InputError("polynomial must have degree >= 1")
    if not phi.is_monic():
        raise InputError(f"polynomial must be monic, leading coefficient is {phi.leading}")
    if d > max_degree:
        raise DegreeGuardExceeded(
            f"degree {d} exceeds the practical degree guard d <= {max_degree} for 64-bit floats"
        )
    if assume_pd1:
        if not in_pd1(phi):
            raise InputError("assume_pd1 was set but the polynomial is not in P_d(1)")
        K = 4.0
    else:
        radius = _coefficient_radius(phi)
        K = 4.0 * radius if radius > 0 else 1.0

    log_tau = _log_tau(eps, K, d)
    if log_tau < math.log(tau_floor):
        raise TauUnderflow(
            f"tau=exp({log_tau:.1f}) is below the precision floor {tau_floor:.1e} at degree {d}; "
            f"64-bit floats support the practical degree guard d <= {max_degree} at moderate epsilon"
        )
    tau = tau_for(eps, K, d)

    f0 = Polynomial(_rescaled(phi, K))
    log.debug("rescaled degree-%d input: K=%.6g tau=%.6e", d, K, tau)
    return NormalizedInput(f0=f0, K=K, original_degree=d), tau


# ---------------------------------------------------------------------------
# Factor products and residuals
# ---------------------------------------------------------------------------

def expand_factors(roots: Iterable[complex]) -> Polynomial:
    """prod (z - r) by sequential convolution; the empty product is 1"""
    coeffs = np.ones(1, dtype=SCALAR_DTYPE)
    for r in as_points(list(roots)):
        coeffs = np.convolve(coeffs, np.array([-r, 1.0], dtype=SCALAR_DTYPE))
    return Polynomial(coeffs)


def residual_norm(phi: Polynomial, roots: PointsLike) -> float:
    """||phi - prod (z - lambda_j)|| in the max-norm"""
    points = as_points(roots)
    if points.size != phi.degree:
        raise InputError(f"expected {phi.degree} roots, got {points.size}")
    return max_norm(phi - expand_factors(points))


def factor_to_root_precision(eps_root: float, d: int, floor: float = DEFAULT_TAU_FLOOR) -> float:
    """
    Factorization tolerance (eps_root / 8d)^d: two members of P_d(1) this close
    have roots at most eps_root apart.
    """
    if not eps_root > 0 or d < 1:
        raise InputError("factor_to_root_precision needs eps_root > 0 and d >= 1")
    base = eps_root / (8.0 * d)
    if d * math.log(base) < math.log(floor):
        raise TauUnderflow(
            f"(eps_root/8d)^d underflows the precision floor {floor:.1e} at d={d}"
        )
    return base ** d
