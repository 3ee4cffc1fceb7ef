import pytest

from stangrow import exponent_ratio, generate


@pytest.fixture(scope="session")
def seq04_2000():
    """The {0,4} sequence to 2000 terms, shared across test modules."""
    return generate((0, 4), 2000)


@pytest.fixture(scope="session")
def ratio04_2000(seq04_2000):
    return exponent_ratio(seq04_2000)
