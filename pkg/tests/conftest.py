import pytest

from slt import fixtures
from slt.spectrum import compute_spectrum


@pytest.fixture(scope="session")
def c0_problem():
    return fixtures.c0()


@pytest.fixture(scope="session")
def c1_problem():
    return fixtures.c1()


@pytest.fixture(scope="session")
def c2_problem():
    return fixtures.c2()


@pytest.fixture(scope="session")
def c0_spec8(c0_problem):
    return compute_spectrum(c0_problem, 8)


@pytest.fixture(scope="session")
def c1_spec8(c1_problem):
    return compute_spectrum(c1_problem, 8)


@pytest.fixture(scope="session")
def c2_spec8(c2_problem):
    return compute_spectrum(c2_problem, 8)


@pytest.fixture(scope="session")
def c0_spec_big(c0_problem):
    # shared by the bilinear-series and resolvent-series tests
    return compute_spectrum(c0_problem, 500)
