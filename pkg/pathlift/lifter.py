"""
Path-lifting pipeline for the m=4 family.

Each stage probes f on the circle |z| = 3/2, lifts the ray from f(z0) towards
tau i^j through an inverse branch of f, certifies the endpoints with the alpha
test, polishes and weeds them, then deflates the accepted roots out of
psi = f - tau i^j. At least half of the remaining roots are found per stage.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .certify import DERIVATIVE_FLOOR, alpha, duplicate_radius
from .complexpoly import (
    SCALAR_DTYPE,
    Polynomial,
    PointsLike,
    as_points,
    eval_many,
    eval_with_derivative,
    expand_factors,
    max_norm,
    rescale_main,
    residual_norm,
    subtract_constant,
)
from .config import SolveConfig
from .errors import DerivativeVanishes, EvaluationOverflow, InputError, InsufficientCrossings, TheoremViolation
from .spectral import deflate

log = logging.getLogger(__name__)

PROBE_RADIUS = 1.5
LOST = complex(np.nan, np.nan)
# |psi| for the ordering, then psi and psi' for the Koebe disk
WEED_EVALUATIONS = 3


def ray_unit(j: int) -> complex:
    """e^{j pi i/2} = i^j, exact for integer j"""
    return 1j ** j


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass
class WedgeBatch:
    ray_index: int
    points: np.ndarray
    w0: np.ndarray
    probe_indices: np.ndarray


@dataclass
class StageStats:
    degree: int
    quadrants_tried: int = 0
    plm_iterations: int = 0
    polish_iterations: int = 0
    points_certified: int = 0
    points_weeded: int = 0
    evaluations: int = 0
    accepted: int = 0
    quadrant: int = 0
    remainder_norm: float = 0.0
    leading_correction: float = 0.0

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class StageResult:
    accepted: np.ndarray
    deflated: Polynomial
    stats: StageStats


@dataclass
class Factorization:
    roots: np.ndarray
    residual: float
    per_stage: List[StageStats]
    K: float
    tau: float
    # accepted sets per stage, in f0 coordinates
    stage_roots: List[np.ndarray] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return int(self.roots.size)

    @property
    def evaluations(self) -> int:
        return sum(s.evaluations for s in self.per_stage)


@dataclass
class PLMTrace:
    """Per-point record of one iterate_plm call"""

    steps: np.ndarray = None
    final_w_abs: np.ndarray = None
    # max_n |f(z_n) - w_n| / |w_n|, inf for points that were lost
    max_wedge_ratio: np.ndarray = None


# ---------------------------------------------------------------------------
# Step counts
# ---------------------------------------------------------------------------

def plm_step_count(tau: float, w0_abs: float, h: float) -> int:
    """N = floor(log(tau/|w0|)/log(1-h)), the last n with |w_n| >= tau"""
    if w0_abs <= tau:
        return 0
    return max(0, math.floor(math.log(tau / w0_abs) / math.log1p(-h)))


def polish_step_count(d: int, tau: float) -> int:
    """M = max(3, 1 + floor(log2 log2(64 d (7/4)^d / tau)))"""
    log2_arg = math.log2(64.0 * d) + d * math.log2(7.0 / 4.0) - math.log2(tau)
    return max(3, 1 + math.floor(math.log2(log2_arg)))


def delta_target(tau: float, d: int) -> float:
    return tau / (8.0 * d) * (4.0 / 7.0) ** d


# ---------------------------------------------------------------------------
# Probe selection
# ---------------------------------------------------------------------------

def _ray_crossings(delta: np.ndarray) -> np.ndarray:
    """Indices nearest the upward zero crossings of the signed angular offsets"""
    n = delta.size
    following = np.roll(delta, -1)
    starts = np.flatnonzero((delta <= 0) & (following > 0) & (following - delta < np.pi))
    ends = (starts + 1) % n
    picks = np.where(np.abs(delta[starts]) <= np.abs(delta[ends]), starts, ends)
    return np.unique(picks)


def _nearest_separated(delta: np.ndarray, count: int, separation: int) -> np.ndarray:
    n = delta.size
    chosen: List[int] = []
    for idx in np.argsort(np.abs(delta), kind='stable'):
        gaps = (abs(int(idx) - c) for c in chosen)
        if all(min(g, n - g) >= separation for g in gaps):
            chosen.append(int(idx))
            if len(chosen) == count:
                break
    return np.array(sorted(chosen), dtype=int)


def _start_values(values: np.ndarray, unit: complex, mode: str) -> np.ndarray:
    if mode == 'projection':
        return (values * np.conj(unit)).real * unit
    return np.abs(values) * unit


def choose_initial_points(f: Polynomial, cfg: Optional[SolveConfig] = None) -> List[WedgeBatch]:
    """
    Evaluates f at probe_multiplier*d equispaced points on |z| = 3/2 and, for each
    ray j pi/2 (j = 1..4), keeps the d probes whose images cross that ray.
    Roots of f must lie in D_{3/4}, which makes arg f increasing along the circle.
    """
    cfg = cfg or SolveConfig()
    d = f.degree
    if d < 1:
        raise InputError("choose_initial_points needs degree >= 1")

    n_probes = cfg.probe_multiplier * d
    probes = PROBE_RADIUS * np.exp(2j * np.pi * np.arange(n_probes) / n_probes)
    values = eval_many(f, probes, cfg.evaluator)

    batches = []
    for j in range(1, cfg.family_m + 1):
        unit = ray_unit(j)
        delta = np.angle(values * np.conj(unit))
        indices = _ray_crossings(delta)
        if indices.size != d:
            log.warning(
                "ray %d: %d crossings for degree %d, falling back to nearest separated probes",
                j, indices.size, d,
            )
            indices = _nearest_separated(delta, d, cfg.probe_multiplier // 2)
            if indices.size < d:
                raise InsufficientCrossings(j, int(indices.size), d)
        batches.append(WedgeBatch(
            ray_index=j,
            points=probes[indices],
            w0=_start_values(values[indices], unit, cfg.w0_mode),
            probe_indices=indices,
        ))
    return batches


# ---------------------------------------------------------------------------
# Path lifting
# ---------------------------------------------------------------------------

def iterate_plm(
    f: Polynomial,
    batch: WedgeBatch,
    tau: float,
    cfg: Optional[SolveConfig] = None,
    trace: Optional[PLMTrace] = None,
    stats: Optional[StageStats] = None,
) -> np.ndarray:
    """
    Runs z_n = z_{n-1} - (f(z_{n-1}) - w_n)/f'(z_{n-1}) with w_n = (1-h)^n w0 for
    N steps per point, then one Newton step towards tau i^j. Lost points come
    back as NaN.
    """
    cfg = cfg or SolveConfig()
    if not tau > 0:
        raise InputError(f"tau must be positive, got {tau}")

    z = as_points(batch.points).copy()
    w0 = as_points(batch.w0)
    count = z.size
    decay = 1.0 - cfg.h
    steps = np.array([plm_step_count(tau, a, cfg.h) for a in np.abs(w0)], dtype=int)
    alive = np.ones(count, dtype=bool)
    worst = np.zeros(count)
    evaluations = 0

    def advance(mask: np.ndarray, target: np.ndarray, previous: np.ndarray) -> None:
        nonlocal evaluations
        idx = np.flatnonzero(mask)
        fz, dfz = eval_with_derivative(f, z[idx])
        evaluations += 2 * idx.size
        if trace is not None:
            with np.errstate(invalid='ignore', divide='ignore'):
                ratio = np.abs(fz - previous) / np.abs(previous)
            worst[idx] = np.fmax(worst[idx], np.where(np.isfinite(ratio), ratio, np.inf))
        flat = ~(np.abs(dfz) >= DERIVATIVE_FLOOR)
        with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
            moved = z[idx] - (fz - target) / np.where(flat, 1.0, dfz)
        lost = flat | ~np.isfinite(moved) | (np.abs(moved) > cfg.divergence_radius)
        z[idx] = moved
        alive[idx[lost]] = False

    n_max = int(steps.max()) if count else 0
    for n in range(1, n_max + 1):
        mask = alive & (steps >= n)
        if not mask.any():
            break
        w_prev = w0[mask] * decay ** (n - 1)
        advance(mask, w0[mask] * decay ** n, w_prev)

    if alive.any():
        final_w = w0[alive] * decay ** steps[alive]
        advance(alive.copy(), np.full(int(alive.sum()), tau * ray_unit(batch.ray_index)), final_w)

    z[~alive] = LOST
    if trace is not None:
        worst[~alive] = np.inf
        trace.steps = steps
        trace.final_w_abs = np.abs(w0) * decay ** steps
        trace.max_wedge_ratio = worst
    if stats is not None:
        stats.evaluations += evaluations
        stats.plm_iterations = max(stats.plm_iterations, n_max)
    log.debug("ray %d: N<=%d, %d of %d points kept", batch.ray_index, n_max, int(alive.sum()), count)
    return z


# ---------------------------------------------------------------------------
# Certification, polishing and weeding
# ---------------------------------------------------------------------------

def select_approx_zeros(psi: Polynomial, y: PointsLike) -> np.ndarray:
    """Keeps, in order, the points certified as approximate zeros of psi (alpha < 1/8)"""
    kept = []
    for point in as_points(y):
        if not np.isfinite(point):
            continue
        try:
            report = alpha(psi, complex(point))
        except (DerivativeVanishes, EvaluationOverflow):
            continue
        if report.certified:
            kept.append(point)
    return np.array(kept, dtype=SCALAR_DTYPE)


def polish(psi: Polynomial, x: PointsLike, tau: float, d_top: int) -> np.ndarray:
    """M plain Newton steps on psi; points whose derivative vanishes are dropped"""
    z = as_points(x).copy()
    for _ in range(polish_step_count(d_top, tau)):
        if z.size == 0:
            break
        fz, dfz = eval_with_derivative(psi, z)
        keep = np.abs(dfz) >= DERIVATIVE_FLOOR
        with np.errstate(over='ignore', invalid='ignore'):
            z = z[keep] - fz[keep] / dfz[keep]
        z = z[np.isfinite(z)]
    return z


def weed(psi: Polynomial, w: PointsLike, strategy: str = 'horner') -> np.ndarray:
    """
    Sorts by |psi| ascending and keeps a point unless some already kept point
    lies in its Koebe disk. Points where psi' vanishes are rejected.
    """
    points = as_points(w)
    points = points[np.isfinite(points)]
    if points.size == 0:
        return points
    magnitudes = np.abs(eval_many(psi, points, strategy))
    accepted: List[complex] = []
    for idx in np.argsort(magnitudes, kind='stable'):
        candidate = complex(points[idx])
        try:
            radius = duplicate_radius(psi, candidate)
        except DerivativeVanishes:
            log.debug("weed rejected %r: derivative vanishes", candidate)
            continue
        # same_root(psi, v, candidate) for every kept v
        if all(abs(v - candidate) >= radius for v in accepted):
            accepted.append(candidate)
    return np.array(accepted, dtype=SCALAR_DTYPE)


# ---------------------------------------------------------------------------
# Stages and the driver
# ---------------------------------------------------------------------------

def half_roots_and_deflate(
    f: Polynomial,
    tau: float,
    cfg: Optional[SolveConfig] = None,
    d_top: Optional[int] = None,
) -> StageResult:
    """
    Tries quadrants j = 1..4 until one yields at least ceil(d/2) accepted roots
    of psi = f - tau i^j, then deflates them out of psi.
    """
    cfg = cfg or SolveConfig()
    d = f.degree
    if d < 2:
        raise InputError("half_roots_and_deflate needs degree >= 2")
    d_top = d_top or d
    need = math.ceil(d / 2)
    stats = StageStats(degree=d)
    attempts: List[Dict[str, Any]] = []

    batches = choose_initial_points(f, cfg)
    stats.evaluations += cfg.probe_multiplier * d
    polish_steps = polish_step_count(d_top, tau)

    for batch in batches:
        j = batch.ray_index
        stats.quadrants_tried = j
        y = iterate_plm(f, batch, tau, cfg, stats=stats)
        psi = subtract_constant(f, tau * ray_unit(j))
        certified = select_approx_zeros(psi, y)
        stats.points_certified += certified.size
        # every finite point gets a full Taylor expansion, d + 1 Horner passes
        stats.evaluations += int(np.count_nonzero(np.isfinite(y))) * (d + 1)
        if cfg.weed_before_polish:
            early = weed(psi, certified, cfg.evaluator)
            stats.points_weeded += certified.size - early.size
            stats.evaluations += WEED_EVALUATIONS * certified.size
            certified = early
        polished = polish(psi, certified, tau, d_top)
        stats.polish_iterations = polish_steps
        stats.evaluations += 2 * polish_steps * certified.size
        accepted = weed(psi, polished, cfg.evaluator)
        stats.evaluations += WEED_EVALUATIONS * polished.size
        stats.points_weeded += polished.size - accepted.size
        log.debug(
            "degree %d quadrant %d: %d certified, %d polished, %d accepted (need %d)",
            d, j, certified.size, polished.size, accepted.size, need,
        )
        attempts.append({
            'quadrant': j,
            'certified': int(certified.size),
            'polished': int(polished.size),
            'accepted': int(accepted.size),
        })
        if accepted.size < need:
            continue

        if accepted.size > d:
            log.warning("quadrant %d accepted %d points for degree %d, truncating", j, accepted.size, d)
            accepted = accepted[:d]
        if accepted.size == d:
            deflated = Polynomial([1.0])
            stats.remainder_norm = max_norm(psi - expand_factors(accepted))
        else:
            result = deflate(psi, accepted, cfg.collision_threshold, cfg.max_node_rotations, cfg.evaluator)
            deflated = result.quotient
            stats.remainder_norm = result.remainder_norm
            stats.leading_correction = result.leading_correction
        stats.accepted = int(accepted.size)
        stats.quadrant = j
        return StageResult(accepted=accepted, deflated=deflated, stats=stats)

    raise TheoremViolation(
        f"no quadrant produced {need} of {d} roots; "
        "unreachable in exact arithmetic, so this is a precision failure",
        stats=attempts + [stats.as_dict()],
    )


def solve(
    phi: Polynomial,
    epsilon: Optional[float] = None,
    cfg: Optional[SolveConfig] = None,
    assume_pd1: bool = False,
) -> Factorization:
    """
    epsilon-factorization of a monic phi: d points lambda_j with
    ||phi - prod (z - lambda_j)|| < epsilon.
    """
    cfg = cfg or SolveConfig()
    eps = cfg.epsilon if epsilon is None else epsilon
    normalized, tau = rescale_main(phi, eps, assume_pd1, cfg.tau_floor, cfg.max_degree)
    d = phi.degree
    K = normalized.K

    if d == 1:
        roots = np.array([-phi.coeffs[0]], dtype=SCALAR_DTYPE)
        return Factorization(roots, residual_norm(phi, roots), [], K, tau, [roots / K])

    f = normalized.f0
    found: List[complex] = []
    per_stage: List[StageStats] = []
    stage_roots: List[np.ndarray] = []
    while len(found) < d:
        if f.degree == 1:
            last = np.array([-f.coeffs[0]], dtype=SCALAR_DTYPE)
            found.extend(last)
            stage_roots.append(last)
            break
        if f.degree == 0:
            raise TheoremViolation(
                f"deflation ended with {len(found)} of {d} roots",
                stats=[s.as_dict() for s in per_stage],
            )
        result = half_roots_and_deflate(f, tau, cfg, d_top=d)
        log.info(
            "stage %d: degree %d, quadrant %d, accepted %d",
            len(per_stage) + 1, f.degree, result.stats.quadrant, result.stats.accepted,
        )
        found.extend(result.accepted)
        stage_roots.append(result.accepted)
        per_stage.append(result.stats)
        f = result.deflated

    roots = K * np.array(found, dtype=SCALAR_DTYPE)
    residual = residual_norm(phi, roots)
    log.info("degree %d factored in %d stages, residual %.3e (epsilon %.1e)", d, len(per_stage), residual, eps)
    return Factorization(roots, residual, per_stage, K, tau, stage_roots)
