import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_tensor(rng, m, n, j):
    return rng.standard_normal((m, n, j)) + 1j * rng.standard_normal((m, n, j))


def random_row(rng, n, j):
    return rng.standard_normal((n, j)) + 1j * rng.standard_normal((n, j))
