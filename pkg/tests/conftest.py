import numpy as np
import pytest
from hypothesis import settings

from pconvex import domains
from pconvex.synthesis import GridSpec, SynthesisConfig, synthesize

SMALL = GridSpec(300, 300, 100)

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


def random_symmetric(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    return 0.5 * (A + A.T)


@pytest.fixture(scope="session")
def ball():
    return domains.ball(1.0)


@pytest.fixture(scope="session")
def ellipsoid():
    return domains.ellipsoid(1.0, 2.0, 3.0)


@pytest.fixture(scope="session")
def torus():
    return domains.solid_torus(2.5, 1.0)


@pytest.fixture(scope="session")
def hartogs():
    return domains.hartogs_example()


@pytest.fixture(scope="session")
def egg():
    return domains.complex_egg(2)


@pytest.fixture(scope="session")
def ball_df(ball):
    return synthesize(ball, 2)


@pytest.fixture(scope="session")
def torus_df(torus):
    return synthesize(torus, 2, SynthesisConfig(n_certify=200, grid=SMALL))
