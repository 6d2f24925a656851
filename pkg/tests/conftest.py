import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hamca.exact_core import GaussianInt, GaussMatrix, GaussVector
from hamca.random_models import make_rng, random_admissible

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=60,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

small = st.integers(-6, 6)
gauss = st.builds(GaussianInt, small, small)


@st.composite
def gauss_vectors(draw, dim):
    return GaussVector([draw(small) for _ in range(dim)], [draw(small) for _ in range(dim)])


@st.composite
def gauss_matrices(draw, dim):
    re = [[draw(small) for _ in range(dim)] for _ in range(dim)]
    im = [[draw(small) for _ in range(dim)] for _ in range(dim)]
    return GaussMatrix(re, im)


@st.composite
def self_adjoint(draw, dim):
    A = draw(gauss_matrices(dim))
    return A + A.dagger()


@st.composite
def admissible(draw, max_dim=6):
    seed = draw(st.integers(0, 2**32 - 1))
    dim = draw(st.integers(1, max_dim))
    return random_admissible(make_rng(seed), dim)


@pytest.fixture
def pauli():
    from hamca.ca_engine import pauli_example

    return pauli_example()


@pytest.fixture
def rng():
    return make_rng(1234)


def as_array(v):
    return np.asarray(v, dtype=complex)
