import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


def clmul_mod(a: int, b: int, poly: int, t: int) -> int:
    """Schoolbook carry-less product reduced by poly; independent of the library tables."""
    acc = 0
    for i in range(t):
        if (b >> i) & 1:
            acc ^= a << i
    for deg in range(2 * t - 2, t - 1, -1):
        if (acc >> deg) & 1:
            acc ^= poly << (deg - t)
    return acc
