import os

import numpy as np
import pytest

from pathlift.complexpoly import Polynomial


@pytest.fixture
def acceptance_runs():
    """Instances per acceptance loop; PATHLIFT_ACCEPTANCE_RUNS=100 gives the full count"""
    return int(os.environ.get('PATHLIFT_ACCEPTANCE_RUNS', 10))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _unit_disk(rng, size):
    return np.sqrt(rng.uniform(0, 1, size)) * np.exp(2j * np.pi * rng.uniform(0, 1, size))


@pytest.fixture
def random_pd1(rng):
    """Factory for monic degree-d polynomials with every lower coefficient in the closed unit disk"""

    def make(d: int) -> Polynomial:
        return Polynomial(np.append(_unit_disk(rng, d), 1.0))

    return make


@pytest.fixture
def random_roots(rng):
    """Factory for root multisets in D_radius with pairwise separation at least min_gap"""

    def make(d: int, radius: float = 0.9, min_gap: float = 1e-3) -> np.ndarray:
        roots = []
        while len(roots) < d:
            z = radius * _unit_disk(rng, 1)[0]
            if all(abs(z - r) >= min_gap for r in roots):
                roots.append(z)
        return np.array(roots)

    return make
