"""Fidelity and seal-security inequalities, evaluated on concrete points.

Nothing here is applied automatically: the caller names the inequalities that
apply to a point. The quantum-estimation bounds (``GRange``, ``TradeoffGeneral``,
``TradeoffD2``) do not govern symbol decoding, and showing where they fail is
one of the things this package is for.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .device import TradeoffPoint, average_fidelities_exact, measure_reprepare
from .errors import ScopeError
from .seal import SealPoint

SATISFY_TOL = 1e-9
WITNESS_TOL = 1e-12


class BoundId(str, Enum):
    F_RANGE = "FRange"
    G_RANGE = "GRange"
    TRADEOFF_GENERAL = "TradeoffGeneral"
    TRADEOFF_D2 = "TradeoffD2"
    BETA_HALF = "BetaHalf"
    ALPHA_BETA_NINE_EIGHTHS = "AlphaBetaNineEighths"
    G_MINUS_F_EIGHTH = "GMinusFEighth"
    QUANTUM_SEAL_D = "QuantumSealD"
    QUANTUM_SEAL_D2 = "QuantumSealD2"


def f0(d: int) -> float:
    return (d + 2) / (2 * (d + 1))


def g0(d: int) -> float:
    return 3 / (2 * (d + 1))


@dataclass(frozen=True)
class BoundResult:
    id: BoundId
    lhs: float
    rhs: float
    relation: str

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.margin >= -SATISFY_TOL

    def __post_init__(self):
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))

    def as_dict(self) -> dict:
        return {"id": self.id.value, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "satisfied": self.satisfied, "relation": self.relation}


@dataclass(frozen=True)
class BoundReport:
    d: int
    results: tuple

    def __getitem__(self, bid) -> BoundResult:
        bid = BoundId(bid)
        for r in self.results:
            if r.id is bid:
                return r
        raise KeyError(bid)

    def __iter__(self):
        return iter(self.results)

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.results)

    def violated(self) -> list[BoundId]:
        return [r.id for r in self.results if not r.satisfied]

    def as_dict(self) -> dict:
        return {"d": self.d, "bounds": [r.as_dict() for r in self.results]}


def tradeoff_general_lhs(F: float, G: float, d: int) -> float:
    """Quadratic form ``(F-F0)^2 + d^2 (G-G0)^2 + 2(d-2)(F-F0)(G-G0)``."""
    x, y = F - f0(d), G - g0(d)
    return x * x + d * d * y * y + 2 * (d - 2) * x * y


def _two_sided(bid, low, value, high, name) -> BoundResult:
    # report whichever side binds
    if value - low <= high - value:
        return BoundResult(bid, low, value, f"{low!r} <= {name}")
    return BoundResult(bid, value, high, f"{name} <= {high!r}")


def _fg(point) -> tuple[float, float]:
    if isinstance(point, SealPoint):
        return 1.0 - point.beta, point.alpha
    return point.F, point.G


def _ab(point) -> tuple[float, float]:
    if isinstance(point, SealPoint):
        return point.alpha, point.beta
    return point.G, 1.0 - point.F


def evaluate_one(bid: BoundId, point, d: int) -> BoundResult:
    bid = BoundId(bid)
    F, G = _fg(point)
    alpha, beta = _ab(point)
    if bid is BoundId.F_RANGE:
        return _two_sided(bid, 2 / (d + 1), F, 1.0, "F")
    if bid is BoundId.G_RANGE:
        return _two_sided(bid, 1 / d, G, 2 / (d + 1), "G")
    if bid is BoundId.TRADEOFF_GENERAL:
        return BoundResult(bid, tradeoff_general_lhs(F, G, d), (d - 1) / (d + 1) ** 2,
                           "(F-F0)^2 + d^2(G-G0)^2 + 2(d-2)(F-F0)(G-G0) <= (d-1)/(d+1)^2")
    if bid is BoundId.TRADEOFF_D2:
        if d != 2:
            raise ScopeError(f"{bid.value} only applies to d = 2, got d = {d}")
        return BoundResult(bid, (F - 2 / 3) ** 2 + 4 * (G - 0.5) ** 2, 1 / 9,
                           "(F-2/3)^2 + 4(G-1/2)^2 <= 1/9")
    if bid is BoundId.BETA_HALF:
        return BoundResult(bid, beta, 0.5, "beta <= 1/2")
    if bid is BoundId.ALPHA_BETA_NINE_EIGHTHS:
        return BoundResult(bid, alpha + beta, 9 / 8, "alpha + beta <= 9/8")
    if bid is BoundId.G_MINUS_F_EIGHTH:
        return BoundResult(bid, G - F, 1 / 8, "G - F <= 1/8")
    if bid is BoundId.QUANTUM_SEAL_D:
        return BoundResult(bid, beta, 1 - 2 / (d + 1), "beta <= 1 - 2/(d+1)")
    if bid is BoundId.QUANTUM_SEAL_D2:
        if d != 2:
            raise ScopeError(f"{bid.value} only applies to d = 2, got d = {d}")
        return BoundResult(bid, beta, 1 / 3, "beta <= 1/3")
    raise AssertionError(bid)


def evaluate(point: TradeoffPoint | SealPoint, d: int, applicable: Iterable) -> BoundReport:
    """Evaluate the named inequalities on ``point``.

    A :class:`SealPoint` is read as ``F = 1 - beta, G = alpha`` for the fidelity
    bounds and a :class:`TradeoffPoint` as ``alpha = G, beta = 1 - F`` for the
    seal bounds.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return BoundReport(d, tuple(evaluate_one(BoundId(b), point, d) for b in applicable))


def violation_witness_g(point) -> bool:
    """True when ``G`` alone forces ``(F-2/3)^2 + 4(G-1/2)^2 > 1/9``, i.e. ``G > 2/3``.

    Accepts a :class:`TradeoffPoint` or a bare ``G`` value; valid in any dimension.
    """
    G = point.G if isinstance(point, TradeoffPoint) else float(point)
    return G >= 2 / 3 + WITNESS_TOL


QUANTUM_ESTIMATE_BOUNDS = (BoundId.F_RANGE, BoundId.G_RANGE, BoundId.TRADEOFF_GENERAL)
CLASSICAL_DECODE_BOUNDS = (BoundId.G_MINUS_F_EIGHTH,)
BIT_SEAL_BOUNDS = (BoundId.BETA_HALF, BoundId.ALPHA_BETA_NINE_EIGHTHS)


def default_bounds(kind: str, d: int) -> tuple:
    """Bounds the caller would normally declare for a point of the given kind."""
    if kind == "quantum":
        return QUANTUM_ESTIMATE_BOUNDS + ((BoundId.TRADEOFF_D2,) if d == 2 else ())
    if kind == "classical":
        return CLASSICAL_DECODE_BOUNDS
    if kind == "seal":
        return BIT_SEAL_BOUNDS
    raise ValueError(kind)


@dataclass(frozen=True)
class QuantumSealScenario:
    d: int
    beta: float
    report: BoundReport


def quantum_seal_bound_scenario(d: int) -> QuantumSealScenario:
    """Detection probability of the optimal-information device used as a quantum-data seal."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    point = average_fidelities_exact(measure_reprepare(d))
    beta = 1.0 - point.F
    ids = [BoundId.QUANTUM_SEAL_D] + ([BoundId.QUANTUM_SEAL_D2] if d == 2 else [])
    return QuantumSealScenario(d, beta, evaluate(SealPoint(point.G, beta), d, ids))
