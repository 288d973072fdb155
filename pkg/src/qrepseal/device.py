"""Quantum repeating devices: measurement instruments plus an estimation rule.

A device measures an incoming carrier with a single-Kraus-per-outcome
instrument, turns the outcome into an estimate (a pure state, or a classical
symbol), and forwards the conditional post-measurement state. Two figures of
merit are computed here: the transmission fidelity ``F`` (how well the
forwarded carrier matches the input) and the estimation fidelity ``G`` (how
well the estimate matches the input, or the probability of decoding the right
symbol).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import CompletenessError, ConfigError, DimensionError, EncodingError, RuleKindError
from .qcore import MAX_DIM, PureState, RngStream, as_matrix, basis_state, haar_amplitudes, psd_sqrt

COMPLETENESS_TOL = 1e-8
PROB_CUTOFF = 1e-14
PROB_SUM_TOL = 1e-12

#: Decode-map value for outcomes that identify no symbol; Bob guesses uniformly.
UNIDENTIFIED = None


class EstimationKind(str, Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


class MeasurementInstrument:
    """Outcome-labelled Kraus operators ``M_k`` with ``sum M_k^dag M_k = I``.

    Parameters
    ----------
    kraus : mapping or sequence of (label, matrix) pairs
        One ``d x d`` operator per outcome. Labels must be hashable and unique.
    """

    def __init__(self, kraus):
        items = list(kraus.items()) if isinstance(kraus, Mapping) else list(kraus)
        if not items:
            raise DimensionError("instrument needs at least one outcome")
        labels = [lab for lab, _ in items]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate outcome labels in {labels}")
        ops = [as_matrix(m) for _, m in items]
        d = ops[0].shape[0]
        if d > MAX_DIM:
            raise DimensionError(f"dimension {d} exceeds cap {MAX_DIM}")
        for lab, m in zip(labels, ops):
            if m.shape != (d, d):
                raise DimensionError(f"Kraus operator {lab!r} has shape {m.shape}, expected {(d, d)}")
        total = sum(m.conj().T @ m for m in ops)
        err = float(np.max(np.abs(total - np.eye(d))))
        if err > COMPLETENESS_TOL:
            raise CompletenessError(f"sum of M_k^dag M_k deviates from identity by {err:.3e}")
        self.labels: tuple = tuple(labels)
        self.kraus: tuple = tuple(ops)
        self.dim = d

    @classmethod
    def from_povm(cls, elements) -> "MeasurementInstrument":
        """Build the square-root instrument ``M_k = sqrt(Pi_k)`` from POVM elements."""
        items = list(elements.items()) if isinstance(elements, Mapping) else list(enumerate(elements))
        return cls([(lab, psd_sqrt(e)) for lab, e in items])

    @classmethod
    def projective(cls, basis: Sequence[PureState], labels=None) -> "MeasurementInstrument":
        labels = range(len(basis)) if labels is None else labels
        return cls([(lab, s.projector()) for lab, s in zip(labels, basis)])

    def povm(self) -> dict:
        return {lab: m.conj().T @ m for lab, m in zip(self.labels, self.kraus)}

    def items(self):
        return zip(self.labels, self.kraus)

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"MeasurementInstrument(dim={self.dim}, outcomes={list(self.labels)})"


@dataclass(frozen=True)
class EstimationRule:
    """Maps instrument outcomes to an estimate.

    Use :meth:`quantum` for a state estimate per outcome and :meth:`classical`
    for a symbol (or :data:`UNIDENTIFIED`) per outcome.
    """

    kind: EstimationKind
    estimates: Mapping[Hashable, PureState] = field(default_factory=dict)
    decode: Mapping[Hashable, int | None] = field(default_factory=dict)
    m: int = 0

    @classmethod
    def quantum(cls, estimates: Mapping[Hashable, PureState]) -> "EstimationRule":
        return cls(EstimationKind.QUANTUM, estimates=dict(estimates))

    @classmethod
    def classical(cls, decode: Mapping[Hashable, int | None], m: int) -> "EstimationRule":
        if m < 1:
            raise ConfigError("number of symbols must be positive")
        for lab, b in decode.items():
            if b is not UNIDENTIFIED and not (isinstance(b, (int, np.integer)) and 0 <= b < m):
                raise EncodingError(f"outcome {lab!r} decodes to {b!r}, outside 0..{m - 1}")
        return cls(EstimationKind.CLASSICAL, decode=dict(decode), m=m)

    @property
    def labels(self) -> frozenset:
        return frozenset(self.estimates if self.kind is EstimationKind.QUANTUM else self.decode)


@dataclass(frozen=True)
class RepeatingDevice:
    instrument: MeasurementInstrument
    rule: EstimationRule
    name: str = "custom"

    def __post_init__(self):
        if frozenset(self.instrument.labels) != self.rule.labels:
            raise ConfigError(
                f"instrument outcomes {sorted(map(str, self.instrument.labels))} do not match "
                f"rule outcomes {sorted(map(str, self.rule.labels))}"
            )
        if self.rule.kind is EstimationKind.QUANTUM:
            for lab, phi in self.rule.estimates.items():
                if phi.dim != self.instrument.dim:
                    raise DimensionError(f"estimate for outcome {lab!r} has dim {phi.dim}")

    @property
    def dim(self) -> int:
        return self.instrument.dim

    @property
    def kind(self) -> EstimationKind:
        return self.rule.kind


@dataclass(frozen=True)
class HaarAlphabet:
    d: int

    def __post_init__(self):
        if not 2 <= self.d <= MAX_DIM:
            raise DimensionError(f"alphabet dimension must be in [2, {MAX_DIM}], got {self.d}")


@dataclass(frozen=True)
class DiscreteAlphabet:
    states: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.states) != len(self.probs) or not self.states:
            raise ConfigError("alphabet needs one probability per state")
        if min(self.probs) < 0 or abs(sum(self.probs) - 1.0) > PROB_SUM_TOL:
            raise ConfigError("alphabet probabilities must be non-negative and sum to 1")
        if len({s.dim for s in self.states}) != 1:
            raise DimensionError("alphabet states must share one dimension")

    @property
    def d(self) -> int:
        return self.states[0].dim


Alphabet = HaarAlphabet | DiscreteAlphabet


@dataclass(frozen=True)
class ClassicalEncoding:
    """Symbol ``b`` is sent as one of ``table[b]`` states with the given weights."""

    m: int
    table: tuple
    prior: tuple

    def __post_init__(self):
        table = tuple(tuple((s, float(p)) for s, p in row) for row in self.table)
        prior = tuple(float(p) for p in self.prior)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "prior", prior)
        if self.m < 1 or len(table) != self.m or len(prior) != self.m:
            raise EncodingError(f"encoding needs {self.m} table rows and prior entries")
        if min(prior) < 0 or abs(sum(prior) - 1.0) > PROB_SUM_TOL:
            raise EncodingError("prior must be non-negative and sum to 1")
        for b, row in enumerate(table):
            if not row:
                raise EncodingError(f"symbol {b} has no states")
            ps = [p for _, p in row]
            if min(ps) < 0 or abs(sum(ps) - 1.0) > PROB_SUM_TOL:
                raise EncodingError(f"conditional probabilities for symbol {b} must sum to 1")
        if len({s.dim for row in table for s, _ in row}) != 1:
            raise DimensionError("encoding states must share one dimension")

    @classmethod
    def uniform(cls, table) -> "ClassicalEncoding":
        """Uniform prior over symbols and uniform choice among each symbol's states."""
        rows = [[(s, 1.0 / len(row)) for s in row] for row in table]
        return cls(len(rows), rows, [1.0 / len(rows)] * len(rows))

    @property
    def d(self) -> int:
        return self.table[0][0][0].dim

    def weighted_states(self):
        """Yield ``(b, state, prior(b) * p(state | b))``."""
        for b, row in enumerate(self.table):
            for s, p in row:
                yield b, s, self.prior[b] * p


@dataclass(frozen=True)
class TradeoffPoint:
    """An ``(F, G)`` pair together with how it was obtained.

    ``mode`` is ``"exact"`` or ``"mc"``; Monte Carlo points also carry the
    sample count, standard errors and the worker count used.
    """

    F: float
    G: float
    d: int
    kind: EstimationKind
    mode: str = "exact"
    n: int | None = None
    F_stderr: float | None = None
    G_stderr: float | None = None
    workers: int | None = None

    def __post_init__(self):
        for name in ("F", "G"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < -1e-10 or v > 1 + 1e-10:
                raise ValueError(f"{name}={v!r} outside [0, 1]")


class Outcome(NamedTuple):
    label: Hashable
    prob: float
    state: PureState


def _check_dim(dim: int, psi: PureState):
    if psi.dim != dim:
        raise DimensionError(f"state of dim {psi.dim} fed to a dim-{dim} instrument")


def apply_instrument(instr: MeasurementInstrument, psi: PureState) -> list[Outcome]:
    """Outcome probabilities and normalized conditional states.

    Outcomes with probability at most ``1e-14`` are dropped.
    """
    _check_dim(instr.dim, psi)
    out = []
    for lab, m in instr.items():
        v = m @ psi.amplitudes
        p = float(np.real(np.vdot(v, v)))
        if p > PROB_CUTOFF:
            out.append(Outcome(lab, p, PureState(v / math.sqrt(p), normalize=True)))
    return out


def _instrument_of(dev) -> MeasurementInstrument:
    return dev.instrument if isinstance(dev, RepeatingDevice) else dev


def transmission_fidelity_pointwise(dev, psi: PureState) -> float:
    """``F_psi = sum_k p_k |<psi|psi_k>|^2``; accepts a device or a bare instrument."""
    return float(
        sum(o.prob * abs(np.vdot(psi.amplitudes, o.state.amplitudes)) ** 2
            for o in apply_instrument(_instrument_of(dev), psi))
    )


def _require_quantum(dev: RepeatingDevice):
    if dev.kind is not EstimationKind.QUANTUM:
        raise RuleKindError(f"device {dev.name!r} decodes classical symbols, not quantum estimates")


def estimation_fidelity_pointwise(dev: RepeatingDevice, psi: PureState) -> float:
    """``G_psi = sum_k p_k |<psi|phi_k>|^2`` for a quantum-estimate device."""
    _require_quantum(dev)
    est = dev.rule.estimates
    return float(
        sum(o.prob * abs(np.vdot(psi.amplitudes, est[o.label].amplitudes)) ** 2
            for o in apply_instrument(dev.instrument, psi))
    )


def _pointwise_batch(dev: RepeatingDevice, psis: np.ndarray):
    """Vectorized ``(F_psi, G_psi)`` over the rows of ``psis``."""
    f = np.zeros(psis.shape[0])
    g = np.zeros(psis.shape[0])
    for lab, m in dev.instrument.items():
        mpsi = psis @ m.T
        f += np.abs(np.sum(np.conj(psis) * mpsi, axis=1)) ** 2
        p = np.sum(np.abs(mpsi) ** 2, axis=1)
        phi = dev.rule.estimates[lab].amplitudes
        g += p * np.abs(psis @ np.conj(phi)) ** 2
    return f, g


def average_fidelities_mc(
    dev: RepeatingDevice,
    alph: Alphabet,
    n: int,
    rng: RngStream,
    workers: int = 1,
) -> TradeoffPoint:
    """Average ``(F, G)`` over an alphabet.

    Haar alphabets are sampled: ``n`` draws split across ``workers`` streams
    (worker ``i`` uses stream index ``i`` under ``rng.seed``), so the result
    depends only on ``(seed, n, workers)``. Discrete alphabets are summed
    exactly and ``n`` and ``rng`` are ignored.
    """
    _require_quantum(dev)
    if n < 1 or workers < 1:
        raise ValueError("need n >= 1 and workers >= 1")
    if alph.d != dev.dim:
        raise DimensionError(f"alphabet dim {alph.d} != device dim {dev.dim}")
    if isinstance(alph, DiscreteAlphabet):
        psis = np.stack([s.amplitudes for s in alph.states])
        f, g = _pointwise_batch(dev, psis)
        w = np.asarray(alph.probs)
        return TradeoffPoint(float(w @ f), float(w @ g), dev.dim, dev.kind)

    sizes = [n // workers + (1 if i < n % workers else 0) for i in range(workers)]

    def work(i):
        stream = rng.derive(i)
        return _pointwise_batch(dev, haar_amplitudes(dev.dim, sizes[i], stream))

    if workers == 1:
        parts = [work(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(workers)))
    f = np.concatenate([p[0] for p in parts])
    g = np.concatenate([p[1] for p in parts])
    se = (lambda x: float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else float("nan"))
    return TradeoffPoint(
        float(np.clip(f.mean(), 0.0, 1.0)), float(np.clip(g.mean(), 0.0, 1.0)), dev.dim, dev.kind,
        mode="mc", n=n, F_stderr=se(f), G_stderr=se(g), workers=workers,
    )


def average_fidelities_exact(dev: RepeatingDevice) -> TradeoffPoint:
    """Haar-average ``(F, G)`` in closed form via the 2-design identity.

    ``F = sum_k (|tr M_k|^2 + tr Pi_k) / (d(d+1))`` and
    ``G = sum_k (tr Pi_k + <phi_k|Pi_k|phi_k>) / (d(d+1))``.
    """
    _require_quantum(dev)
    d = dev.dim
    f = g = 0.0
    for lab, m in dev.instrument.items():
        pi = m.conj().T @ m
        tr_pi = float(np.real(np.trace(pi)))
        phi = dev.rule.estimates[lab].amplitudes
        f += float(abs(np.trace(m))) ** 2 + tr_pi
        g += tr_pi + float(np.real(np.vdot(phi, pi @ phi)))
    norm = d * (d + 1)
    return TradeoffPoint(min(f / norm, 1.0), min(g / norm, 1.0), d, dev.kind)


def _require_classical(dev: RepeatingDevice):
    if dev.kind is not EstimationKind.CLASSICAL:
        raise RuleKindError(f"device {dev.name!r} produces quantum estimates, not classical symbols")


def decode_success(dev: RepeatingDevice, b: int, psi: PureState, m: int) -> float:
    """Probability that ``psi`` (carrying symbol ``b``) is decoded as ``b``.

    Unidentified outcomes are credited ``1/m``, the expected success of a
    uniform guess.
    """
    total = 0.0
    for lab, pi in dev.instrument.povm().items():
        p = float(np.real(np.vdot(psi.amplitudes, pi @ psi.amplitudes)))
        target = dev.rule.decode[lab]
        if target is UNIDENTIFIED:
            total += p / m
        elif target == b:
            total += p
    return total


def classical_estimation_fidelity(dev: RepeatingDevice, enc: ClassicalEncoding) -> TradeoffPoint:
    """Exact ``(F, G)`` of a symbol-decoding device on a discrete encoding."""
    _require_classical(dev)
    if enc.d != dev.dim:
        raise DimensionError(f"encoding dim {enc.d} != device dim {dev.dim}")
    if dev.rule.m != enc.m:
        raise EncodingError(f"device decodes {dev.rule.m} symbols, encoding has {enc.m}")
    f = g = 0.0
    for b, s, w in enc.weighted_states():
        f += w * transmission_fidelity_pointwise(dev, s)
        g += w * decode_success(dev, b, s, enc.m)
    return TradeoffPoint(min(f, 1.0), min(g, 1.0), dev.dim, dev.kind)


def classical_view(dev: RepeatingDevice, decode: Mapping | None = None, m: int | None = None,
                   name: str | None = None) -> RepeatingDevice:
    """Reuse a device's instrument with a symbol-decoding rule.

    By default outcome ``k`` decodes to its position in the outcome list.
    """
    if decode is None:
        decode = {lab: i for i, lab in enumerate(dev.instrument.labels)}
    if m is None:
        m = max([b for b in decode.values() if b is not UNIDENTIFIED], default=1) + 1
        m = max(m, 2)
    return RepeatingDevice(dev.instrument, EstimationRule.classical(decode, m), name or f"{dev.name}/decode")


# -- built-in catalogue -------------------------------------------------------

def _rotated_basis(angle: float):
    c, s = math.cos(angle), math.sin(angle)
    return PureState([c, s]), PureState([-s, c])


def do_nothing(d: int = 2, guess: int = 0, classical: bool = False, m: int = 2) -> RepeatingDevice:
    """Forward the carrier untouched and guess."""
    instr = MeasurementInstrument([(0, np.eye(d))])
    if classical:
        return RepeatingDevice(instr, EstimationRule.classical({0: UNIDENTIFIED}, m), "do_nothing")
    if not 0 <= guess < d:
        raise ConfigError(f"guess index {guess} outside 0..{d - 1}")
    return RepeatingDevice(instr, EstimationRule.quantum({0: basis_state(d, guess)}), "do_nothing")


def measure_reprepare(d: int = 2) -> RepeatingDevice:
    """Computational-basis measurement, forwarding and estimating ``|k>``."""
    basis = [basis_state(d, k) for k in range(d)]
    instr = MeasurementInstrument([(k, np.outer(basis[k].amplitudes, basis[k].amplitudes.conj()))
                                   for k in range(d)])
    return RepeatingDevice(instr, EstimationRule.quantum(dict(enumerate(basis))), "measure_reprepare")


def basis_decode(d: int = 2) -> RepeatingDevice:
    """Computational-basis measure-and-keep, decoding outcome ``k`` as symbol ``k``."""
    return classical_view(measure_reprepare(d), m=d, name="basis_decode")


def breidbart(angle: float = math.pi / 8) -> RepeatingDevice:
    """Projective measurement in the basis rotated by ``angle`` (pi/8 is Breidbart's)."""
    b0, b1 = _rotated_basis(angle)
    instr = MeasurementInstrument.projective([b0, b1])
    return RepeatingDevice(instr, EstimationRule.classical({0: 0, 1: 1}, 2), "breidbart")


def weak_family(lam: float) -> RepeatingDevice:
    """Qubit weak measurement of strength ``lam`` in [0, 1/2].

    ``M_0 = diag(sqrt(1/2 + lam), sqrt(1/2 - lam))``, ``M_1`` with ``lam -> -lam``,
    estimating ``|0>`` and ``|1>``. Its exact Haar averages are
    ``F = (2 + 2 sqrt(1/4 - lam^2)) / 3`` and ``G = 1/2 + lam/3``.
    """
    if not 0.0 <= lam <= 0.5:
        raise ConfigError(f"weak_family needs lam in [0, 1/2], got {lam}")
    a, b = math.sqrt(0.5 + lam), math.sqrt(0.5 - lam)
    instr = MeasurementInstrument([(0, np.diag([a, b])), (1, np.diag([b, a]))])
    rule = EstimationRule.quantum({0: basis_state(2, 0), 1: basis_state(2, 1)})
    return RepeatingDevice(instr, rule, "weak_family")


def weak_family_closed_form(lam: float) -> tuple[float, float]:
    return (2 + 2 * math.sqrt(0.25 - lam * lam)) / 3, 0.5 + lam / 3


BUILTIN_DEVICES = {
    "do_nothing": do_nothing,
    "measure_reprepare": measure_reprepare,
    "basis_decode": basis_decode,
    "breidbart": breidbart,
    "weak_family": weak_family,
}


def builtin_device(name: str, **params) -> RepeatingDevice:
    try:
        factory = BUILTIN_DEVICES[name]
    except KeyError:
        raise ConfigError(f"unknown device {name!r}; known: {sorted(BUILTIN_DEVICES)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from None


# -- built-in encodings -------------------------------------------------------

def bb84_encoding() -> ClassicalEncoding:
    """0 -> {|0>, |+>}, 1 -> {|1>, |->}, all equally likely."""
    r = 1 / math.sqrt(2)
    return ClassicalEncoding.uniform([
        [PureState([1, 0]), PureState([r, r])],
        [PureState([0, 1]), PureState([r, -r])],
    ])


def simplified_encoding() -> ClassicalEncoding:
    """0 -> sqrt(3)/2|0> +- 1/2|1>, 1 -> 1/2|0> +- sqrt(3)/2|1>."""
    c, s = math.sqrt(3) / 2, 0.5
    return ClassicalEncoding.uniform([
        [PureState([c, s]), PureState([c, -s])],
        [PureState([s, c]), PureState([s, -c])],
    ])


def orthogonal_encoding(d: int = 2) -> ClassicalEncoding:
    return ClassicalEncoding.uniform([[basis_state(d, b)] for b in range(d)])


BUILTIN_ENCODINGS = {
    "bb84": bb84_encoding,
    "simplified": simplified_encoding,
    "orthogonal": orthogonal_encoding,
}


def builtin_encoding(name: str, **params) -> ClassicalEncoding:
    try:
        factory = BUILTIN_ENCODINGS[name]
    except KeyError:
        raise ConfigError(f"unknown encoding {name!r}; known: {sorted(BUILTIN_ENCODINGS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from None


def random_device(d: int, outcomes: int, rng: RngStream, name: str = "random") -> RepeatingDevice:
    """Random single-Kraus instrument with Haar-random state estimates.

    Draws Ginibre operators ``K_k`` and normalizes them as
    ``M_k = K_k S^{-1/2}`` with ``S = sum_k K_k^dag K_k``.
    """
    g = rng.generator
    ks = [g.standard_normal((d, d)) + 1j * g.standard_normal((d, d)) for _ in range(outcomes)]
    s = sum(k.conj().T @ k for k in ks)
    w, v = np.linalg.eigh(s)
    s_inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    instr = MeasurementInstrument([(k, ks[k] @ s_inv_sqrt) for k in range(outcomes)])
    est = {k: PureState(haar_amplitudes(d, 1, rng)[0], normalize=True) for k in range(outcomes)}
    return RepeatingDevice(instr, EstimationRule.quantum(est), name)
