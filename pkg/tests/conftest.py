import numpy as np
import pytest

import dgsl


@pytest.fixture(scope="session")
def sine():
    return dgsl.get_problem("sine")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def space_on(n, r):
    return dgsl.DGSpace(dgsl.build_structured(n), r)


@pytest.fixture
def small_space():
    return space_on(2, 1)
