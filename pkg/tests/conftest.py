from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from seqmatch.model import Distribution, Sequence

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_distribution(rng: np.random.Generator, size: int, zero_prob: float = 0.0) -> Distribution:
    w = rng.random(size)
    if zero_prob:
        w[rng.random(size) < zero_prob] = 0.0
        if not w.any():
            w[rng.integers(size)] = 1.0
    return Distribution(w / w.sum())


def random_sequence(rng: np.random.Generator, size: int, n: int) -> Sequence:
    return Sequence(rng.integers(0, size, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
