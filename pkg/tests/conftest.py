import warnings

import numpy as np
import pytest

from sumprod.numtheory import MultiplicativeTables, sieve_primes


@pytest.fixture(scope="session")
def prime_table():
    return sieve_primes(10 ** 6)


@pytest.fixture(scope="session")
def tables_1e5():
    return MultiplicativeTables.build(10 ** 5)


@pytest.fixture(autouse=True)
def _quiet_norm_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*error terms degrade.*")
        warnings.filterwarnings("ignore", message=".*bounds degrade.*")
        yield


def rng(seed=1729):
    return np.random.default_rng(seed)
