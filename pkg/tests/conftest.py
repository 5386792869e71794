import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import lresnet

DIM = 4


def space_vectors(dim: int = DIM, bound: float = 5.0):
    """Space components of moderate size, so 64-bit identities hold to 1e-9."""
    return arrays(
        np.float64,
        (dim,),
        elements=st.floats(min_value=-bound, max_value=bound, allow_nan=False, width=64),
    )


curvatures = st.sampled_from([-0.5, -1.0, -2.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def x() -> np.ndarray:
    return np.array([3.0, 2.0, -2.0])


@pytest.fixture
def y() -> np.ndarray:
    return np.array([3.0, 2.0, 2.0])


@pytest.fixture
def batch(rng) -> lresnet.LorentzBatch:
    return lresnet.sample_points(rng, 64, 8)
