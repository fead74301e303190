import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pathlift import lifter, spectral
from pathlift.complexpoly import Polynomial, eval_many, expand_factors, subtract_constant, tau_for
from pathlift.config import SolveConfig
from pathlift.errors import InputError, TauUnderflow
from pathlift.lifter import (
    PLMTrace,
    WedgeBatch,
    choose_initial_points,
    delta_target,
    half_roots_and_deflate,
    iterate_plm,
    plm_step_count,
    polish,
    polish_step_count,
    ray_unit,
    select_approx_zeros,
    solve,
    weed,
)
from pathlift.oracle import match_multisets, oracle_roots

H = 1 / 27
QUARTER = Polynomial([-0.25, 0, 1])
PROBE_STEP = 4 * math.pi / 676


def test_step_counts():
    assert plm_step_count(1e-10, 1.0, H) == 610
    assert plm_step_count(1.0, 0.5, H) == 0
    assert polish_step_count(8, 1.6187e-12) == 6
    assert polish_step_count(1, 0.5) == 3
    assert delta_target(1e-10, 2) == pytest.approx(1e-10 / 16 * (4 / 7) ** 2)


def test_ray_units_are_exact():
    assert [ray_unit(j) for j in range(1, 5)] == [1j, -1, -1j, 1]


@pytest.mark.parametrize('d', [1, 3, 5])
def test_monomial_probes_evenly_spaced(d):
    batches = choose_initial_points(Polynomial([0] * d + [1]))
    assert [b.ray_index for b in batches] == [1, 2, 3, 4]
    for batch in batches:
        assert batch.points.size == d
        assert_allclose(np.abs(batch.points), 1.5, rtol=1e-15)
        assert np.all(np.diff(batch.probe_indices) == 676)


def test_quadratic_probes_near_ray():
    for batch in choose_initial_points(QUARTER):
        assert batch.points.size == 2
        unit = ray_unit(batch.ray_index)
        offsets = np.angle(eval_many(QUARTER, batch.points) * np.conj(unit))
        assert np.all(np.abs(offsets) <= PROBE_STEP)
        assert_allclose(batch.w0, np.abs(eval_many(QUARTER, batch.points)) * unit)


@pytest.mark.parametrize('d', [2, 3, 4])
def test_probe_argument_variation(d, random_roots):
    f = expand_factors(random_roots(d, radius=0.75))
    n = 676 * d
    values = eval_many(f, 1.5 * np.exp(2j * np.pi * np.arange(n) / n))
    steps = np.angle(np.roll(values, -1) / values)
    assert np.all(steps > 0)
    assert np.all(steps <= PROBE_STEP)


def test_projection_start_values():
    cfg = SolveConfig(w0_mode='projection')
    for batch in choose_initial_points(QUARTER, cfg):
        f0 = eval_many(QUARTER, batch.points)
        assert np.all(np.abs(f0 - batch.w0) < H * np.abs(batch.w0) / 2)
        assert_allclose(np.angle(batch.w0 * np.conj(ray_unit(batch.ray_index))), 0, atol=1e-15)


def test_choose_initial_points_degree_zero():
    with pytest.raises(InputError):
        choose_initial_points(Polynomial([1]))


def test_iterate_linear_is_exact():
    f = Polynomial([0, 1])
    tau = 1e-8
    for batch in choose_initial_points(f):
        trace = PLMTrace()
        y = iterate_plm(f, batch, tau, trace=trace)
        assert_allclose(y, tau * ray_unit(batch.ray_index), atol=1e-22)
        assert np.all(trace.max_wedge_ratio <= H / 2)


@pytest.mark.parametrize('ray', [1, 3, 4])
def test_wedge_invariant_on_quadratic(ray):
    tau = 1e-9
    batch = choose_initial_points(QUARTER)[ray - 1]
    trace = PLMTrace()
    y = iterate_plm(QUARTER, batch, tau, trace=trace)
    assert np.all(trace.max_wedge_ratio <= H / 2)
    assert np.all(trace.final_w_abs >= tau)
    assert np.all(trace.final_w_abs <= tau / (1 - H) * (1 + 1e-12))
    psi = subtract_constant(QUARTER, tau * ray_unit(ray))
    assert select_approx_zeros(psi, y).size == 2


def test_iterate_plm_marks_lost_points():
    f = Polynomial([0, 0, 1])
    # the origin is a critical point: f' vanishes there
    batch = WedgeBatch(ray_index=1, points=np.array([0j, 1.5 + 0j]), w0=np.array([1j, 2.25j]), probe_indices=np.array([0, 1]))
    y = iterate_plm(f, batch, 1e-6)
    assert np.isnan(y[0])
    assert np.isfinite(y[1])


def test_select_approx_zeros():
    psi = Polynomial([-1, 0, 1])
    assert select_approx_zeros(psi, []).size == 0
    assert_allclose(select_approx_zeros(psi, [1.01, 2.0]), [1.01])
    assert_allclose(select_approx_zeros(psi, [np.nan, -1.001, 0.0]), [-1.001])


def test_polish():
    psi = Polynomial([-1, 0, 1])
    assert polish(psi, [1.0], 1e-10, 2)[0] == 1.0
    polished = polish(psi, [1.01, -0.98], 1e-10, 2)
    assert np.max(np.abs(polished - [1, -1])) < delta_target(1e-10, 2)
    assert polish(Polynomial([0, 0, 1]), [0.0], 1e-10, 2).size == 0


def test_weed():
    assert weed(QUARTER, [0.5, 0.5]).size == 1
    kept = weed(QUARTER, [0.5 + 1e-15, -0.5, 0.5])
    assert_allclose(np.sort(kept.real), [-0.5, 0.5])
    assert weed(QUARTER, []).size == 0


def test_weed_is_idempotent(random_roots, rng):
    roots = random_roots(6, radius=0.7, min_gap=0.05)
    psi = expand_factors(roots)
    noisy = np.concatenate([roots + 1e-13 * rng.normal(size=6), roots[:3] + 1e-12])
    once = weed(psi, noisy)
    assert once.size == 6
    assert_allclose(weed(psi, once), once)


def test_half_roots_quadratic():
    result = half_roots_and_deflate(QUARTER, tau_for(1e-4, 1, 2))
    assert result.accepted.size >= 1
    assert result.deflated.degree == 2 - result.accepted.size
    assert 1 <= result.stats.quadrants_tried <= 4
    assert result.stats.quadrant == result.stats.quadrants_tried


def test_half_roots_quartic():
    f = expand_factors([0.3, -0.3, 0.3j, -0.3j])
    tau = tau_for(1e-6, 1, 4)
    result = half_roots_and_deflate(f, tau)
    assert result.accepted.size >= 2
    assert result.deflated.degree == 4 - result.accepted.size
    psi = subtract_constant(f, tau * ray_unit(result.stats.quadrant))
    reference = oracle_roots(psi).roots
    for v in result.accepted:
        assert np.min(np.abs(reference - v)) < delta_target(tau, 4)
    assert result.stats.polish_iterations >= 3
    assert result.stats.remainder_norm < 1e-12


def test_half_roots_rejects_linear():
    with pytest.raises(InputError):
        half_roots_and_deflate(Polynomial([0, 1]), 1e-8)


def test_solve_linear_exact():
    result = solve(Polynomial([-(2.5 - 1j), 1]), 1e-4)
    assert result.roots[0] == 2.5 - 1j
    assert result.residual == 0
    assert result.per_stage == []


def test_solve_quadratic():
    result = solve(Polynomial([-1, 0, 1]), 1e-6)
    assert result.residual < 1e-6
    assert match_multisets(result.roots, [1, -1]) < 1e-6
    assert result.evaluations > 0


def test_solve_quadruple_root():
    result = solve(Polynomial([0, 0, 0, 0, 1]), 1e-4)
    assert result.degree == 4
    assert result.residual < 1e-4
    assert np.all(np.abs(result.roots) <= 32 * result.residual ** 0.25)


@pytest.mark.parametrize('cfg', [
    SolveConfig(),
    SolveConfig(weed_before_polish=True),
    SolveConfig(w0_mode='projection'),
    SolveConfig(evaluator='numpy'),
])
def test_solve_random_pd1(cfg, random_pd1):
    phi = random_pd1(8)
    result = solve(phi, 1e-4, cfg)
    assert result.residual < 1e-4
    assert result.roots.size == 8
    assert sum(s.size for s in result.stage_roots) == 8
    for stats in result.per_stage:
        assert stats.accepted >= math.ceil(stats.degree / 2)
        assert 1 <= stats.quadrants_tried <= 4


def test_solve_assume_pd1():
    phi = Polynomial([0.5, -0.5j, 0.25, 1])
    result = solve(phi, 1e-4, assume_pd1=True)
    assert result.K == 4
    assert result.residual < 1e-4


def test_solve_defaults_to_config_epsilon():
    result = solve(Polynomial([-1, 0, 1]), cfg=SolveConfig(epsilon=1e-3))
    assert result.residual < 1e-3


def test_solve_tau_underflow():
    with pytest.raises(TauUnderflow):
        solve(Polynomial([-1] + [0] * 19 + [1]), 1e-300)


@pytest.fixture
def capped_weed(monkeypatch):
    """weed that keeps only ceil(d/2) roots, so every stage deflates and solve has to iterate"""
    full = lifter.weed

    def capped(psi, w, strategy='horner'):
        return full(psi, w, strategy)[:math.ceil(psi.degree / 2)]

    monkeypatch.setattr(lifter, 'weed', capped)


@pytest.mark.parametrize('d', [5, 8, 10])
def test_solve_through_partial_stages(d, capped_weed, random_pd1):
    phi = random_pd1(d)
    result = solve(phi, 1e-4)
    assert result.residual < 1e-4
    assert result.roots.size == d
    assert 2 <= len(result.per_stage) <= math.ceil(math.log2(d)) + 1
    for stats in result.per_stage:
        assert stats.accepted == math.ceil(stats.degree / 2)
        assert stats.remainder_norm < 1e-10
    for current, following in zip(result.per_stage, result.per_stage[1:]):
        assert following.degree == current.degree - current.accepted
        assert following.degree <= current.degree // 2
    assert sum(s.size for s in result.stage_roots) == d


def _record_strategies(monkeypatch, module):
    seen = []
    original = module.eval_many

    def recording(p, points, strategy='horner'):
        seen.append(strategy)
        return original(p, points, strategy)

    monkeypatch.setattr(module, 'eval_many', recording)
    return seen


def test_evaluator_reaches_weed_and_deflate(monkeypatch, capped_weed):
    in_lifter = _record_strategies(monkeypatch, lifter)
    in_spectral = _record_strategies(monkeypatch, spectral)
    f = expand_factors([0.3, -0.3, 0.3j, -0.3j])
    result = half_roots_and_deflate(f, tau_for(1e-6, 1, 4), SolveConfig(evaluator='numpy'))
    assert result.deflated.degree == 2
    assert in_lifter and set(in_lifter) == {'numpy'}
    assert in_spectral and set(in_spectral) == {'numpy'}


def test_weed_forwards_strategy():
    assert_allclose(weed(QUARTER, [0.5, -0.5], 'numpy'), weed(QUARTER, [0.5, -0.5]))
    with pytest.raises(InputError):
        weed(QUARTER, [0.5], 'clenshaw')


def test_stage_counts_every_evaluation(monkeypatch):
    # two copies of one root, the other root, a lost point and an uncertified one
    lifted = np.array([0.5, 0.5, -0.5, np.nan, 5.0], dtype=complex)
    monkeypatch.setattr(lifter, 'iterate_plm', lambda *args, **kwargs: lifted.copy())
    tau = tau_for(1e-4, 1, 2)
    result = half_roots_and_deflate(QUARTER, tau, SolveConfig(weed_before_polish=True))
    stats = result.stats
    steps = polish_step_count(2, tau)
    assert stats.quadrant == 1
    assert stats.points_certified == 3
    assert stats.points_weeded == 1
    assert stats.accepted == 2
    probes = 676 * 2
    taylor = 4 * 3
    early_weed, polishing, final_weed = 3 * 3, 2 * steps * 2, 3 * 2
    assert stats.evaluations == probes + taylor + early_weed + polishing + final_weed
