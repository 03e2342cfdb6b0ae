import gmpy2
import pytest


@pytest.fixture
def ctx256():
    """gmpy2 context at 256 bits for test-side arithmetic on results."""
    with gmpy2.context(precision=256):
        yield


def mp(bits: int):
    return gmpy2.context(precision=bits)
