import math

import pytest
from pydantic import ValidationError

from pathlift.config import DEFAULT_H, SolveConfig, log_level


def test_defaults():
    cfg = SolveConfig()
    assert cfg.h == DEFAULT_H
    assert cfg.probe_multiplier == 676
    assert cfg.wedge_halfangle == pytest.approx(math.pi / 4)
    assert cfg.h <= math.sin(cfg.wedge_halfangle) / 19


@pytest.mark.parametrize('overrides', [
    {'h': 0.05},
    {'family_m': 3},
    {'epsilon': 0},
    {'w0_mode': 'average'},
])
def test_rejected(overrides):
    with pytest.raises(ValidationError):
        SolveConfig(**overrides)


def test_frozen():
    with pytest.raises(ValidationError):
        SolveConfig().h = 0.01


def test_from_env(monkeypatch):
    monkeypatch.setenv('PATHLIFT_EPSILON', '1e-6')
    monkeypatch.setenv('PATHLIFT_WEED_BEFORE_POLISH', 'yes')
    monkeypatch.setenv('PATHLIFT_EVALUATOR', 'numpy')
    monkeypatch.setenv('PATHLIFT_PROBE_MULTIPLIER', '')
    cfg = SolveConfig.from_env(evaluator='horner', w0_mode=None)
    assert cfg.epsilon == 1e-6
    assert cfg.weed_before_polish
    assert cfg.evaluator == 'horner'
    assert cfg.probe_multiplier == 676


def test_log_level(monkeypatch):
    monkeypatch.delenv('PATHLIFT_LOG_LEVEL', raising=False)
    assert log_level() == 'WARNING'
    monkeypatch.setenv('PATHLIFT_LOG_LEVEL', 'debug')
    assert log_level() == 'DEBUG'
