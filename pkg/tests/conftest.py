import numpy as np
import pytest


def half_integer_lattice(kmax):
    k = np.arange(1, kmax + 1)
    return np.concatenate([k - 0.5, -(k - 0.5)])


def paired_lattice(kmax):
    k = np.arange(-kmax, kmax + 1)
    return np.concatenate([k + 0.5, k + 0.5 + 1.0 / (2 * (1 + np.abs(k)))])


@pytest.fixture(scope="session")
def lattice_1e4():
    return half_integer_lattice(10_000)


@pytest.fixture(scope="session")
def lattice_1000():
    return half_integer_lattice(1000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
