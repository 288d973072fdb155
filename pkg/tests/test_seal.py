import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrepseal.device import UNIDENTIFIED, MeasurementInstrument
from qrepseal.errors import ProtocolError
from qrepseal.qcore import PureState, RngStream, basis_state, haar_sample
from qrepseal.seal import (
    SealProtocol,
    builtin_seal,
    detection_probability,
    evaluate_seal,
    perfect_encodings,
    readability,
)


def test_optimal_qbs():
    sp = evaluate_seal(builtin_seal("optimal_qbs"))
    assert sp.alpha == pytest.approx(0.75, abs=1e-12)
    assert sp.beta == pytest.approx(0.375, abs=1e-12)
    assert sp.alpha + sp.beta == pytest.approx(9 / 8, abs=1e-12)


def test_perfect_seal():
    sp = evaluate_seal(builtin_seal("perfect_seal"))
    assert (sp.alpha, sp.beta) == pytest.approx((1.0, 0.0), abs=1e-12)


def test_simplified_seal():
    sp = evaluate_seal(builtin_seal("simplified_seal"))
    assert (sp.alpha, sp.beta) == pytest.approx((0.75, 0.375), abs=1e-12)


@pytest.mark.parametrize("name", ["optimal_qbs", "perfect_seal", "simplified_seal"])
def test_builtin_bit_seals_respect_bounds(name):
    p = builtin_seal(name)
    sp = evaluate_seal(p)
    assert p.m == 2
    assert sp.beta <= 0.5 + 1e-9
    assert sp.alpha + sp.beta <= 9 / 8 + 1e-9


@pytest.mark.parametrize("prior", [(0.3, 0.7), (0.9, 0.1), (0.0, 1.0)])
def test_prior_invariance_under_bit_swap_symmetry(prior):
    base = builtin_seal("optimal_qbs")
    p = SealProtocol(base.dim_alice, base.dim_bob, [list(r) for r in base.family], base.decoder,
                     base.decode_map, prior=prior)
    a, b = evaluate_seal(base), evaluate_seal(p)
    assert (b.alpha, b.beta) == pytest.approx((a.alpha, a.beta), abs=1e-12)


def test_perfect_encodings_classifier():
    assert all(perfect_encodings(builtin_seal("perfect_seal")).values())
    assert not any(perfect_encodings(builtin_seal("optimal_qbs")).values())


def test_unidentified_outcome_gets_uniform_credit():
    dec = MeasurementInstrument([("x", np.eye(2))])
    p = SealProtocol(1, 2, [basis_state(2, 0), basis_state(2, 1)], dec, {"x": UNIDENTIFIED})
    assert readability(p) == pytest.approx(0.5, abs=1e-12)
    assert detection_probability(p) == pytest.approx(0.0, abs=1e-12)


def test_validation_errors():
    dec = MeasurementInstrument([(0, np.eye(2))])
    with pytest.raises(ProtocolError):
        SealProtocol(2, 2, [basis_state(2, 0)], dec, {0: 0})
    with pytest.raises(ProtocolError):
        SealProtocol(1, 2, [basis_state(2, 0)], dec, {0: 3})
    with pytest.raises(ProtocolError):
        SealProtocol(1, 2, [basis_state(2, 0)], dec, {0: 0}, prior=[0.5])
    with pytest.raises(ProtocolError):
        SealProtocol(1, 2, [[(basis_state(2, 0), 0.4)]], dec, {0: 0})


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(2, 3), st.integers(2, 3), st.integers(0, 2**32))
def test_identity_decoder_never_detected(da, db, m, seed):
    rng = RngStream(seed, 0)
    encs = [haar_sample(da * db, rng) for _ in range(m)]
    dec = MeasurementInstrument([(0, np.eye(db))])
    p = SealProtocol(da, db, encs, dec, {0: UNIDENTIFIED})
    sp = evaluate_seal(p)
    assert sp.beta == pytest.approx(0.0, abs=1e-12)
    assert -1e-10 <= sp.alpha <= 1 + 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2), st.integers(0, 2**32))
def test_alpha_beta_in_unit_interval(da, seed):
    rng = RngStream(seed, 0)
    encs = [haar_sample(da * 2, rng) for _ in range(2)]
    theta = rng.generator.uniform(0, np.pi)
    v = PureState([np.cos(theta), np.sin(theta)])
    w = PureState([-np.sin(theta), np.cos(theta)])
    dec = MeasurementInstrument.projective([v, w])
    p = SealProtocol(da, 2, encs, dec, {lab: i for i, lab in enumerate(dec.labels)})
    sp = evaluate_seal(p)
    assert -1e-10 <= sp.alpha <= 1 + 1e-10
    assert -1e-10 <= sp.beta <= 1 + 1e-10
