"""Quantum seals: readability and detection probability.

Alice maps a value ``b`` to a joint pure state on ``Phi (x) Psi``, keeps
``Phi`` and publishes ``Psi`` together with a decoding instrument and a map
from outcomes to values. Bob's success probability averaged over ``b`` is the
readability ``alpha``; the probability that Alice's projective check on the
original joint state fails after Bob decodes is the detection probability
``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping

import numpy as np

from .device import COMPLETENESS_TOL, PROB_CUTOFF, PROB_SUM_TOL, UNIDENTIFIED, MeasurementInstrument
from .errors import ConfigError, ProtocolError
from .qcore import PureState

EIGENSTATE_TOL = 1e-10


@dataclass(frozen=True)
class SealPoint:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < -1e-10 or v > 1 + 1e-10:
                raise ValueError(f"{name}={v!r} outside [0, 1]")


class SealProtocol:
    """A seal for values ``b in 0..m-1``.

    Parameters
    ----------
    dim_alice, dim_bob : int
        Dimensions of Alice's kept system and the published system.
        ``dim_alice == 1`` means there is no kept system.
    encodings : sequence or mapping indexed by ``b``
        Each entry is either one joint :class:`PureState` of dimension
        ``dim_alice * dim_bob`` or a list of ``(state, weight)`` pairs when a
        value may be sealed in several ways.
    decoder : MeasurementInstrument
        Bob's suggested measurement on the published system.
    decode_map : mapping
        Outcome label to value ``b`` or :data:`~qrepseal.device.UNIDENTIFIED`.
    prior : sequence of float, optional
        Defaults to uniform.
    """

    def __init__(self, dim_alice: int, dim_bob: int, encodings, decoder: MeasurementInstrument,
                 decode_map: Mapping[Hashable, int | None], prior=None, name: str = "custom"):
        if isinstance(encodings, Mapping):
            keys = sorted(encodings)
            if keys != list(range(len(keys))):
                raise ProtocolError(f"encodings must be indexed 0..m-1, got {keys}")
            encodings = [encodings[k] for k in keys]
        family = []
        for b, enc in enumerate(encodings):
            rows = [(enc, 1.0)] if isinstance(enc, PureState) else [(s, float(w)) for s, w in enc]
            if not rows:
                raise ProtocolError(f"value {b} has no encoding state")
            ws = [w for _, w in rows]
            if min(ws) < 0 or abs(sum(ws) - 1.0) > PROB_SUM_TOL:
                raise ProtocolError(f"encoding weights for value {b} must sum to 1")
            for s, _ in rows:
                if s.dim != dim_alice * dim_bob:
                    raise ProtocolError(
                        f"encoding for value {b} has dim {s.dim}, expected {dim_alice}*{dim_bob}")
            family.append(tuple(rows))
        m = len(family)
        if m < 1:
            raise ProtocolError("seal needs at least one value")
        prior = [1.0 / m] * m if prior is None else [float(p) for p in prior]
        if len(prior) != m or min(prior) < 0 or abs(sum(prior) - 1.0) > PROB_SUM_TOL:
            raise ProtocolError("prior must have one non-negative entry per value and sum to 1")
        if decoder.dim != dim_bob:
            raise ProtocolError(f"decoder acts on dim {decoder.dim}, published system has dim {dim_bob}")
        total = sum(k.conj().T @ k for k in decoder.kraus)
        if np.max(np.abs(total - np.eye(dim_bob))) > COMPLETENESS_TOL:
            raise ProtocolError("decoder is not complete")
        if set(decode_map) != set(decoder.labels):
            raise ProtocolError("decode_map must cover exactly the decoder outcomes")
        for lab, b in decode_map.items():
            if b is not UNIDENTIFIED and not (isinstance(b, (int, np.integer)) and 0 <= b < m):
                raise ProtocolError(f"outcome {lab!r} decodes to invalid value {b!r}")
        self.dim_alice = int(dim_alice)
        self.dim_bob = int(dim_bob)
        self.family: tuple = tuple(family)
        self.prior: tuple = tuple(prior)
        self.decoder = decoder
        self.decode_map = dict(decode_map)
        self.m = m
        self.name = name

    def lifted_kraus(self):
        """Yield ``(label, I_Phi (x) M_k)``."""
        eye = np.eye(self.dim_alice)
        for lab, mk in self.decoder.items():
            yield lab, np.kron(eye, mk)

    def weighted_encodings(self):
        """Yield ``(b, joint_state, prior(b) * weight)``."""
        for b, rows in enumerate(self.family):
            for s, w in rows:
                yield b, s, self.prior[b] * w

    def __repr__(self):
        return f"SealProtocol({self.name!r}, dA={self.dim_alice}, dB={self.dim_bob}, m={self.m})"


def readability(p: SealProtocol) -> float:
    """Average probability that Bob's decoded value equals Alice's."""
    lifted = [(lab, k.conj().T @ k) for lab, k in p.lifted_kraus()]
    alpha = 0.0
    for b, s, w in p.weighted_encodings():
        v = s.amplitudes
        for lab, pi in lifted:
            prob = float(np.real(np.vdot(v, pi @ v)))
            target = p.decode_map[lab]
            if target is UNIDENTIFIED:
                alpha += w * prob / p.m
            elif target == b:
                alpha += w * prob
    return min(max(alpha, 0.0), 1.0)


def detection_probability(p: SealProtocol) -> float:
    """Average probability that Alice's check detects Bob's decoding.

    For outcome ``k`` the check fails with probability
    ``1 - |<enc|post_k>|^2`` where ``post_k`` is the normalized state after
    ``I_Phi (x) M_k``.
    """
    lifted = list(p.lifted_kraus())
    beta = 0.0
    for _, s, w in p.weighted_encodings():
        v = s.amplitudes
        for _, k in lifted:
            kv = k @ v
            prob = float(np.real(np.vdot(kv, kv)))
            if prob <= PROB_CUTOFF:
                continue
            overlap = float(abs(np.vdot(v, kv))) ** 2 / prob
            beta += w * prob * (1.0 - overlap)
    return min(max(beta, 0.0), 1.0)


def evaluate_seal(p: SealProtocol) -> SealPoint:
    return SealPoint(readability(p), detection_probability(p))


def perfect_encodings(p: SealProtocol) -> dict:
    """Per-encoding check of whether the published state is an eigenstate of the decoder.

    An encoding counts as an eigenstate when one decoder outcome occurs with
    probability 1 (within ``1e-10``). Returns ``{(b, index): bool}``; no
    aggregate verdict is drawn.
    """
    lifted = [k.conj().T @ k for _, k in p.lifted_kraus()]
    out = {}
    for b, rows in enumerate(p.family):
        for i, (s, _) in enumerate(rows):
            v = s.amplitudes
            probs = [float(np.real(np.vdot(v, pi @ v))) for pi in lifted]
            out[(b, i)] = max(probs) >= 1.0 - EIGENSTATE_TOL
    return out


# -- built-in catalogue -------------------------------------------------------

def _ket(d: int, k: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[k] = 1.0
    return v


def optimal_qbs() -> SealProtocol:
    """Bit seal ``sqrt(3)/2 |f_b>|e_b> + 1/2 |f_~b>|e_~b>`` decoded in the ``e`` basis."""
    f = [_ket(2, 0), _ket(2, 1)]
    e = [_ket(2, 0), _ket(2, 1)]
    enc = []
    for b in (0, 1):
        nb = 1 - b
        enc.append(PureState(math.sqrt(3) / 2 * np.kron(f[b], e[b]) + 0.5 * np.kron(f[nb], e[nb])))
    decoder = MeasurementInstrument([(k, np.outer(e[k], e[k])) for k in (0, 1)])
    return SealProtocol(2, 2, enc, decoder, {0: 0, 1: 1}, name="optimal_qbs")


def perfect_seal() -> SealProtocol:
    """Orthogonal encoding of a bit with no kept system."""
    enc = [PureState(_ket(2, 0)), PureState(_ket(2, 1))]
    decoder = MeasurementInstrument([(k, np.outer(_ket(2, k), _ket(2, k))) for k in (0, 1)])
    return SealProtocol(1, 2, enc, decoder, {0: 0, 1: 1}, name="perfect_seal")


def simplified_seal() -> SealProtocol:
    """Each bit sealed as one of two equally likely non-orthogonal qubit states."""
    c, s = math.sqrt(3) / 2, 0.5
    enc = [
        [(PureState([c, s]), 0.5), (PureState([c, -s]), 0.5)],
        [(PureState([s, c]), 0.5), (PureState([s, -c]), 0.5)],
    ]
    decoder = MeasurementInstrument([(k, np.outer(_ket(2, k), _ket(2, k))) for k in (0, 1)])
    return SealProtocol(1, 2, enc, decoder, {0: 0, 1: 1}, name="simplified_seal")


BUILTIN_SEALS = {
    "optimal_qbs": optimal_qbs,
    "perfect_seal": perfect_seal,
    "simplified_seal": simplified_seal,
}


def builtin_seal(name: str) -> SealProtocol:
    try:
        return BUILTIN_SEALS[name]()
    except KeyError:
        raise ConfigError(f"unknown seal {name!r}; known: {sorted(BUILTIN_SEALS)}") from None
