import pytest

from charlab import sieve_primes


@pytest.fixture(scope="session")
def table_small():
    return sieve_primes(10**5)


@pytest.fixture(scope="session")
def table6():
    return sieve_primes(10**6)


@pytest.fixture(scope="session")
def table7():
    return sieve_primes(10**7)
