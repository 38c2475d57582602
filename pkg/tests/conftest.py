import numpy as np
import pytest

from unicodec.core import SeedSpec
from unicodec.polar import PolarCodeSpec, construct_polar_code


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def seed():
    return SeedSpec(master_seed=0x5EED)


@pytest.fixture
def toy_code():
    """(8,4) polar code, the classical info set {3,5,6,7}."""
    return PolarCodeSpec(name="toy-8-4", n=3, K=4, info_set=(3, 5, 6, 7))


@pytest.fixture(scope="session")
def code_64():
    return construct_polar_code(64, 32, design_snr_db=2.0, name="polar-64-32")


@pytest.fixture(scope="session")
def fig1_code():
    """(256,128) DE code designed for FER 1e-6."""
    return construct_polar_code(256, 128, name="polar-256-128")


@pytest.fixture
def noisy_llrs(rng):
    """BPSK + AWGN LLRs drawn from the shared test generator."""

    def draw(codeword, sigma):
        y = 1.0 - 2.0 * np.asarray(codeword, dtype=np.float64) + sigma * rng.standard_normal(len(codeword))
        return 2.0 * y / sigma**2

    return draw
