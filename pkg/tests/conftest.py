import numpy as np
import pytest

from hyperharm.geometry import make_space
from hyperharm.psdo import get_analysis

# the four standard parameter pairs exercised throughout: the hyperbolic
# plane, 3-space, 5-space, and one pair with a double root
PAIRS = [(1, 0), (2, 0), (4, 0), (2, 1)]


@pytest.fixture(scope="session")
def space10():
    return make_space(1, 0)


@pytest.fixture(scope="session")
def space20():
    return make_space(2, 0)


@pytest.fixture(scope="session")
def space40():
    return make_space(4, 0)


@pytest.fixture(scope="session")
def space21():
    return make_space(2, 1)


@pytest.fixture(scope="session")
def all_spaces(space10, space20, space40, space21):
    return [space10, space20, space40, space21]


@pytest.fixture(scope="session")
def analysis20(space20):
    # get_analysis memoizes per space, so acceptance and unit tests share it
    return get_analysis(space20)


@pytest.fixture(scope="session")
def analysis10(space10):
    return get_analysis(space10)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
