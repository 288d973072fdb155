"""Conversion between repeating devices and seals, and the F = 1 - beta, G = alpha check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import (
    BUILTIN_ENCODINGS,
    ClassicalEncoding,
    EstimationKind,
    EstimationRule,
    RepeatingDevice,
    TradeoffPoint,
    basis_decode,
    bb84_encoding,
    breidbart,
    classical_estimation_fidelity,
    classical_view,
    do_nothing,
    orthogonal_encoding,
    simplified_encoding,
    weak_family,
)
from .errors import DimensionError, NotProductError, RuleKindError
from .qcore import PureState
from .seal import SealPoint, SealProtocol, evaluate_seal

SCHMIDT_TOL = 1e-10


def device_to_seal(dev: RepeatingDevice, enc: ClassicalEncoding) -> SealProtocol:
    """Seal whose published states are the encoding's carriers and whose decoder is the device.

    Alice keeps nothing (``dim_alice == 1``), so her check is the projector onto
    the carrier state she sent.
    """
    if dev.kind is not EstimationKind.CLASSICAL:
        raise RuleKindError("device_to_seal needs a symbol-decoding device")
    if enc.d != dev.dim:
        raise DimensionError(f"encoding dim {enc.d} != device dim {dev.dim}")
    return SealProtocol(
        1, dev.dim, [list(row) for row in enc.table], dev.instrument, dev.rule.decode,
        prior=enc.prior, name=f"seal({dev.name})",
    )


def _bob_factor(p: SealProtocol, b: int, s: PureState) -> PureState:
    if p.dim_alice == 1:
        return s
    c = s.amplitudes.reshape(p.dim_alice, p.dim_bob)
    _, sv, vh = np.linalg.svd(c)
    if sv.size > 1 and sv[1] > SCHMIDT_TOL:
        raise NotProductError(b, sv[1])
    return PureState(vh[0], normalize=True)  # C = a b^T, so row 0 of vh is b up to phase


def seal_to_device(p: SealProtocol) -> tuple[RepeatingDevice, ClassicalEncoding]:
    """Split a product-state seal into a decoding device and a carrier encoding."""
    table = [[(_bob_factor(p, b, s), w) for s, w in rows] for b, rows in enumerate(p.family)]
    rule = EstimationRule.classical(p.decode_map, p.m)
    dev = RepeatingDevice(p.decoder, rule, name=f"device({p.name})")
    return dev, ClassicalEncoding(p.m, table, p.prior)


@dataclass(frozen=True)
class EquivalenceReport:
    tradeoff: TradeoffPoint
    seal: SealPoint
    f_gap: float
    g_gap: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.f_gap <= self.tol and self.g_gap <= self.tol


def verify_equivalence(dev: RepeatingDevice, enc: ClassicalEncoding, tol: float = 1e-12) -> EquivalenceReport:
    """Evaluate ``(F, G)`` on the device side and ``(alpha, beta)`` on the seal side and compare."""
    point = classical_estimation_fidelity(dev, enc)
    sp = evaluate_seal(device_to_seal(dev, enc))
    return EquivalenceReport(point, sp, abs(point.F - (1 - sp.beta)), abs(point.G - sp.alpha), tol)


def builtin_pairs() -> dict[str, tuple[RepeatingDevice, ClassicalEncoding]]:
    """Every built-in (device, encoding) combination used for the equivalence check."""
    pairs = {
        "breidbart+bb84": (breidbart(), bb84_encoding()),
        "basis_decode+simplified": (basis_decode(), simplified_encoding()),
        "basis_decode+orthogonal": (basis_decode(), orthogonal_encoding()),
        "basis_decode+bb84": (basis_decode(), bb84_encoding()),
        "breidbart+simplified": (breidbart(), simplified_encoding()),
        "weak_family(0.3)+orthogonal": (classical_view(weak_family(0.3)), orthogonal_encoding()),
    }
    for name, factory in BUILTIN_ENCODINGS.items():
        pairs[f"do_nothing+{name}"] = (do_nothing(classical=True), factory())
    return pairs
