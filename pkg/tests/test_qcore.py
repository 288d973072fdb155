import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrepseal.errors import DimensionError, NotPsdError
from qrepseal.qcore import (
    PureState,
    RngStream,
    apply,
    basis_state,
    fidelity,
    haar_amplitudes,
    inner,
    psd_sqrt,
)

from conftest import random_psd

amps = st.integers(2, 6).flatmap(
    lambda d: st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=d, max_size=d)
).filter(lambda v: sum(a * a + b * b for a, b in v) > 1e-3)


def _state(pairs):
    return PureState([complex(a, b) for a, b in pairs], normalize=True)


def test_unnormalized_rejected():
    with pytest.raises(DimensionError):
        PureState([1.0, 1.0])


def test_normalize_flag():
    s = PureState([3.0, 4.0], normalize=True)
    assert np.allclose(s.amplitudes, [0.6, 0.8])


def test_too_small_dim():
    with pytest.raises(DimensionError):
        PureState([1.0])


def test_state_is_immutable():
    s = basis_state(2, 0)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply(np.eye(3), basis_state(2, 0).amplitudes)


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)
    p = 0.5 * np.ones((2, 2))
    assert np.allclose(psd_sqrt(p), p, atol=1e-12)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPsdError):
        psd_sqrt(np.diag([1.0, -0.5]))


@pytest.mark.parametrize("d", range(2, 9))
def test_psd_sqrt_squares_back(d):
    gen = np.random.default_rng(d)
    for _ in range(5):
        m = random_psd(gen, d)
        r = psd_sqrt(m)
        assert np.max(np.abs(r @ r - m)) <= 1e-10 * max(1.0, np.max(np.abs(m)))


@given(amps, amps)
def test_inner_conjugate_symmetric(a, b):
    if len(a) != len(b):
        return
    x, y = _state(a), _state(b)
    assert inner(x, y) == pytest.approx(np.conj(inner(y, x)), abs=1e-12)


@given(amps)
def test_self_fidelity_is_one(a):
    s = _state(a)
    assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)


def test_rng_streams_reproducible_and_distinct():
    a = RngStream(7, 3).generator.random(4)
    b = RngStream(7, 3).generator.random(4)
    c = RngStream(7, 4).generator.random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_haar_moments(d):
    n = 100_000
    psi = haar_amplitudes(d, n, RngStream(99, d))
    assert np.allclose(np.linalg.norm(psi, axis=1), 1.0)
    p = np.abs(psi[:, 0]) ** 2
    se1 = p.std(ddof=1) / np.sqrt(n)
    se2 = (p**2).std(ddof=1) / np.sqrt(n)
    assert abs(p.mean() - 1 / d) <= 4 * se1
    assert abs((p**2).mean() - 2 / (d * (d + 1))) <= 4 * se2


@settings(max_examples=20)
@given(st.integers(0, 2**64 - 1))
def test_any_u64_seed_accepted(seed):
    RngStream(seed, 0).generator.random()
