import numpy as np
import pytest

from dnhirota import kernels

RANKS = list(range(3, 9))


@pytest.fixture
def rng():
    # fixed seed; recorded so failures reproduce
    return np.random.default_rng(20240607)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)
