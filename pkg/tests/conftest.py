import numpy as np
import pytest

from qrepseal.qcore import RngStream


@pytest.fixture
def rng():
    return RngStream(12345, 0)


def random_psd(gen: np.random.Generator, d: int) -> np.ndarray:
    a = gen.normal(size=(d, d)) + 1j * gen.normal(size=(d, d))
    return a @ a.conj().T
