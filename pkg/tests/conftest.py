import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from optoqht import kernels

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=sorted(kernels.implementations()))
def impl(request):
    """Each available kernel backend in turn."""
    return kernels.implementations()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hurwitz(rng, n, shift=0.5):
    M = rng.normal(size=(n, n))
    lam = np.max(np.linalg.eigvals(M).real)
    return M - (lam + shift) * np.eye(n)


def random_psd(rng, n):
    B = rng.normal(size=(n, n))
    return B @ B.T
