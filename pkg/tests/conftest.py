import numpy as np
import pytest

from sptchain.model import ModelParams, sample_realization


@pytest.fixture
def ideal_l6():
    """Cluster-limit chain: perfect drive, disordered stabilizers only."""
    return sample_realization(ModelParams(L=6, J=1.0, dJ=1.0, delta=0.0), 7)


@pytest.fixture
def generic_l6():
    """Generic interacting chain with all couplings on."""
    p = ModelParams(L=6, J=1.0, dJ=1.0, V=0.1, dV=0.1, h=0.1, dh=0.1, delta=0.1)
    return sample_realization(p, 11)


def random_state(L, seed):
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(2**L) + 1j * rng.standard_normal(2**L)
    return amp / np.linalg.norm(amp)
