import os

import numpy as np
import pytest


def _seed():
    return int(os.environ.get("SDM_SEED", "20240811"))


@pytest.fixture
def rng():
    return np.random.RandomState(_seed())


@pytest.fixture(scope="session")
def session_seed():
    return _seed()
