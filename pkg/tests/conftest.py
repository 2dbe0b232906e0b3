import numpy as np
import pytest

from spinr import weights


@pytest.fixture(scope="session")
def op2():
    """The OP^2 construction is the expensive step; build it once."""
    return weights.op2_construction()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
