import numpy as np
import pytest

from melnlab.config import OrderCoefficients, SystemConfig


def random_block(rng, scale=1.0) -> OrderCoefficients:
    v = rng.uniform(-1.0, 1.0, 12) * scale
    return OrderCoefficients(a=tuple(v[:3]), b=tuple(v[3:6]),
                             alpha=tuple(v[6:9]), beta=tuple(v[9:12]))


def random_config(rng, n, k, scale=1.0) -> SystemConfig:
    return SystemConfig(n=n, k=k, orders=tuple(random_block(rng, scale) for _ in range(k)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
