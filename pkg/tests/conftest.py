import numpy as np
import pytest
from hypothesis import settings

from seqmtl.autodiff import ParameterStore, set_check_numerics

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _numerics_on():
    old = set_check_numerics(True)
    yield
    set_check_numerics(old)


@pytest.fixture
def store():
    return ParameterStore()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
