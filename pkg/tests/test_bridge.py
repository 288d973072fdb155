import numpy as np
import pytest

from qrepseal.bridge import builtin_pairs, device_to_seal, seal_to_device, verify_equivalence
from qrepseal.device import MeasurementInstrument, bb84_encoding, classical_estimation_fidelity, do_nothing, weak_family
from qrepseal.errors import NotProductError, RuleKindError
from qrepseal.qcore import PureState, RngStream, haar_sample
from qrepseal.seal import SealProtocol, builtin_seal, evaluate_seal


@pytest.mark.parametrize("name", sorted(builtin_pairs()))
def test_equivalence_on_builtin_pairs(name):
    dev, enc = builtin_pairs()[name]
    rep = verify_equivalence(dev, enc)
    assert rep.passed
    assert rep.f_gap <= 1e-12 and rep.g_gap <= 1e-12


def test_do_nothing_gives_zero_detection():
    rep = verify_equivalence(do_nothing(classical=True), bb84_encoding())
    assert rep.seal.beta == pytest.approx(0.0, abs=1e-12)
    assert rep.tradeoff.F == pytest.approx(1.0, abs=1e-12)


def test_quantum_device_rejected():
    with pytest.raises(RuleKindError):
        device_to_seal(weak_family(0.2), bb84_encoding())


def test_entangled_seal_rejected():
    with pytest.raises(NotProductError) as info:
        seal_to_device(builtin_seal("optimal_qbs"))
    assert info.value.schmidt_coefficient > 1e-10


@pytest.mark.parametrize("name", ["perfect_seal", "simplified_seal"])
def test_round_trip_builtin(name):
    p = builtin_seal(name)
    a, b = evaluate_seal(p), evaluate_seal(device_to_seal(*seal_to_device(p)))
    assert (b.alpha, b.beta) == pytest.approx((a.alpha, a.beta), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_product_seal_with_kept_system(seed):
    # Alice keeps a system, but every encoding is a product, so the kept part is irrelevant
    rng = RngStream(seed, 0)
    encs = []
    for _ in range(2):
        a, b = haar_sample(2, rng), haar_sample(3, rng)
        encs.append(PureState(np.kron(a.amplitudes, b.amplitudes), normalize=True))
    basis = [haar_sample(3, rng)]
    q, _ = np.linalg.qr(np.column_stack([basis[0].amplitudes, rng.generator.normal(size=(3, 2))]))
    dec = MeasurementInstrument.projective([PureState(q[:, i], normalize=True) for i in range(3)])
    labels = list(dec.labels)
    p = SealProtocol(2, 3, encs, dec, {labels[0]: 0, labels[1]: 1, labels[2]: None})
    before = evaluate_seal(p)
    dev, enc = seal_to_device(p)
    after = evaluate_seal(device_to_seal(dev, enc))
    assert (after.alpha, after.beta) == pytest.approx((before.alpha, before.beta), abs=1e-12)
    pt = classical_estimation_fidelity(dev, enc)
    assert pt.F == pytest.approx(1 - before.beta, abs=1e-12)
    assert pt.G == pytest.approx(before.alpha, abs=1e-12)
