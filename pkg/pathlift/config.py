"""
Solver configuration.
Defaults follow the m=4 family; every field can be overridden from PATHLIFT_* env vars.
"""
import math
import os
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

DEFAULT_H = 1.0 / 27.0
DEFAULT_PROBE_MULTIPLIER = 676
DEFAULT_MAX_DEGREE = 24
DEFAULT_TAU_FLOOR = 1e-250

ENV_PREFIX = 'PATHLIFT_'


def _env_bool(value: str) -> bool:
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


# env var suffix -> (field name, parser)
_ENV_FIELDS = {
    'EPSILON': ('epsilon', float),
    'H': ('h', float),
    'PROBE_MULTIPLIER': ('probe_multiplier', int),
    'MAX_DEGREE': ('max_degree', int),
    'TAU_FLOOR': ('tau_floor', float),
    'WEED_BEFORE_POLISH': ('weed_before_polish', _env_bool),
    'W0_MODE': ('w0_mode', str),
    'EVALUATOR': ('evaluator', str),
}


class SolveConfig(BaseModel):
    """Tunables of the path-lifting pipeline. tau is derived per input, see complexpoly.rescale_main."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(1e-4, gt=0)
    h: float = Field(DEFAULT_H, gt=0)
    family_m: int = 4
    probe_multiplier: int = Field(DEFAULT_PROBE_MULTIPLIER, ge=4)
    max_degree: int = Field(DEFAULT_MAX_DEGREE, ge=1)
    tau_floor: float = Field(DEFAULT_TAU_FLOOR, gt=0)
    divergence_radius: float = Field(10.0, gt=0)
    max_node_rotations: int = Field(8, ge=0)
    collision_threshold: float = Field(1e-13, gt=0)
    weed_before_polish: bool = False
    w0_mode: Literal['modulus', 'projection'] = 'modulus'
    evaluator: Literal['horner', 'numpy'] = 'horner'

    @property
    def wedge_halfangle(self) -> float:
        return math.pi / self.family_m

    @model_validator(mode='after')
    def _check_wedge(self) -> 'SolveConfig':
        if self.family_m != 4:
            raise ValueError(f"only the m=4 family is implemented, got family_m={self.family_m}")
        limit = math.sin(self.wedge_halfangle) / 19.0
        if self.h > limit:
            raise ValueError(f"h={self.h} exceeds sin(A)/19 = {limit:.6f}")
        return self

    @classmethod
    def from_env(cls, **overrides: Any) -> 'SolveConfig':
        values: dict = {}
        for suffix, (name, parse) in _ENV_FIELDS.items():
            raw = os.environ.get(ENV_PREFIX + suffix)
            if raw is not None and raw != '':
                values[name] = parse(raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def log_level() -> str:
    return os.environ.get(ENV_PREFIX + 'LOG_LEVEL', 'WARNING').upper()
