import numpy as np
import pytest

from secprec.model import ChannelSet, Targets


def make_channels(seed: int, n_t: int = 4, k: int = 2,
                  estimated: bool = False) -> ChannelSet:
    rng = np.random.default_rng(seed)
    h_d = (rng.normal(size=n_t) + 1j * rng.normal(size=n_t)) / np.sqrt(2)
    h_e = (rng.normal(size=(k, n_t)) + 1j * rng.normal(size=(k, n_t))) / np.sqrt(2)
    return ChannelSet(h_d=h_d, h_e=h_e, estimated=estimated)


def make_targets(k: int, gamma_d_db: float = 10.0,
                 gamma_e_db: float = 5.0) -> Targets:
    return Targets(gamma_d=10 ** (gamma_d_db / 10),
                   gamma_e=(10 ** (gamma_e_db / 10),) * k)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
