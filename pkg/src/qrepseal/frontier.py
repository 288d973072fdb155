"""Mapping the achievable (F, G) region of parameterized device families.

Families are swept on a grid (exact fidelities at every point) and searched
with a deterministic grid-seeded compass search for the largest ``G`` at a
required minimum ``F``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bounds import BoundId, evaluate, violation_witness_g
from .device import (
    ClassicalEncoding,
    EstimationKind,
    EstimationRule,
    MeasurementInstrument,
    RepeatingDevice,
    TradeoffPoint,
    average_fidelities_exact,
    bb84_encoding,
    breidbart,
    classical_estimation_fidelity,
    weak_family,
)
from .errors import DimensionError, InfeasibleError, QRepSealError

BUCKET_WIDTH = 1e-3
FEASIBLE_TOL = 1e-9


@dataclass(frozen=True)
class Param:
    name: str
    lo: float
    hi: float

    @property
    def span(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class DeviceFamily:
    """Named map from a parameter vector to a device.

    Quantum-estimate families are scored with exact Haar averages; classical
    families with the exact sum over their fixed ``encoding``.
    """

    name: str
    params: tuple
    builder: Callable[..., RepeatingDevice]
    kind: EstimationKind
    d: int
    encoding: ClassicalEncoding | None = None

    def evaluate(self, theta) -> TradeoffPoint:
        theta = tuple(float(t) for t in theta)
        try:
            dev = self.builder(*theta)
        except QRepSealError as exc:
            raise type(exc)(f"{self.name} at theta={theta}: {exc}") from exc
        if self.kind is EstimationKind.QUANTUM:
            return average_fidelities_exact(dev)
        return classical_estimation_fidelity(dev, self.encoding)


@dataclass(frozen=True)
class FrontierEntry:
    family: str
    theta: tuple
    point: TradeoffPoint


@dataclass
class FrontierResult:
    family: str
    kind: EstimationKind
    d: int
    points: list
    envelope: list
    metadata: dict = field(default_factory=dict)


def pareto_envelope(entries: Sequence[FrontierEntry], bucket: float = BUCKET_WIDTH) -> list:
    """Non-dominated entries, thinned to the highest-``G`` entry per ``F`` bucket.

    Ties go to the smaller ``F``, then the lexicographically smaller parameter
    vector, then the family name. Output is sorted by increasing ``F``.
    """
    order = sorted(entries, key=lambda e: (-e.point.F, -e.point.G, e.theta, e.family))
    front = []
    best_g = -math.inf
    for e in order:
        if e.point.G > best_g:
            front.append(e)
            best_g = e.point.G
    buckets: dict = {}
    for e in front:
        key = math.floor(e.point.F / bucket)
        cur = buckets.get(key)
        if cur is None or (-e.point.G, e.point.F, e.theta, e.family) < (-cur.point.G, cur.point.F, cur.theta, cur.family):
            buckets[key] = e
    return sorted(buckets.values(), key=lambda e: (e.point.F, e.theta, e.family))


def _grid_axes(family: DeviceFamily, grid) -> list:
    counts = [grid] * len(family.params) if isinstance(grid, int) else list(grid)
    if len(counts) != len(family.params) or min(counts) < 2:
        raise ValueError("grid needs >= 2 points for each parameter")
    return [np.linspace(p.lo, p.hi, c) for p, c in zip(family.params, counts)]


def sweep(family: DeviceFamily, grid=101) -> FrontierResult:
    """Exact fidelities on a full tensor grid of parameter values."""
    axes = _grid_axes(family, grid)
    entries = [FrontierEntry(family.name, tuple(float(t) for t in theta), family.evaluate(theta))
               for theta in itertools.product(*axes)]
    return FrontierResult(
        family.name, family.kind, family.d, entries, pareto_envelope(entries),
        {"grid": [len(a) for a in axes], "bucket_width": BUCKET_WIDTH},
    )


@dataclass(frozen=True)
class OptimizerConfig:
    seed_grid: int = 21
    penalty: float = 1e3
    initial_step: float = 0.1
    final_step: float = 1e-7
    search_tol: float = 1e-12
    max_evals: int = 200_000


@dataclass
class OptimizationResult:
    theta: tuple
    point: TradeoffPoint
    objective: float
    seed_theta: tuple
    seed_objective: float
    trace: list


def maximize_g_at_f(family: DeviceFamily, f_min: float, opt: OptimizerConfig | None = None) -> OptimizationResult:
    """Largest ``G`` over the family subject to ``F >= f_min``.

    The score of a candidate is ``G - penalty * max(0, f_min - F)``. Candidates
    are ranked first by feasibility (``F >= f_min - search_tol``) and then by
    score, so a feasible incumbent is never traded for an infeasible one.
    Seeds come from a coarse grid; refinement is compass search with the step
    halved from ``initial_step`` to ``final_step`` times each parameter range.
    """
    opt = opt or OptimizerConfig()
    if f_min > 1.0 + FEASIBLE_TOL:
        raise InfeasibleError(f"f_min={f_min} exceeds 1")
    lo = np.array([p.lo for p in family.params])
    hi = np.array([p.hi for p in family.params])
    span = hi - lo
    evals = 0

    def score(theta):
        nonlocal evals
        evals += 1
        pt = family.evaluate(theta)
        obj = pt.G - opt.penalty * max(0.0, f_min - pt.F)
        return (pt.F >= f_min - opt.search_tol, obj), pt

    seeds = itertools.product(*_grid_axes(family, opt.seed_grid))
    best_key, best_pt, best_theta = None, None, None
    for theta in seeds:
        key, pt = score(theta)
        if best_key is None or key > best_key:
            best_key, best_pt, best_theta = key, pt, np.array(theta, dtype=float)
    seed_theta, seed_key = tuple(best_theta.tolist()), best_key

    trace = [{"step": opt.initial_step, "theta": list(seed_theta), "objective": seed_key[1]}]
    step = opt.initial_step
    while step >= opt.final_step and evals < opt.max_evals:
        cand_best = None
        for i in range(len(lo)):
            for sign in (1.0, -1.0):
                theta = best_theta.copy()
                theta[i] = np.clip(theta[i] + sign * step * span[i], lo[i], hi[i])
                if theta[i] == best_theta[i]:
                    continue
                key, pt = score(theta)
                if key > best_key and (cand_best is None or key > cand_best[0]):
                    cand_best = (key, pt, theta)
        if cand_best is not None:
            best_key, best_pt, best_theta = cand_best
            trace.append({"step": step, "theta": best_theta.tolist(), "objective": best_key[1]})
        else:
            step /= 2
    if best_pt.F < f_min - FEASIBLE_TOL:
        raise InfeasibleError(f"no parameters of {family.name} reach F >= {f_min} (best F={best_pt.F})")
    return OptimizationResult(tuple(best_theta.tolist()), best_pt, best_key[1], seed_theta, seed_key[1], trace)


@dataclass
class RegionRow:
    entry: FrontierEntry
    kind: EstimationKind
    report: object
    quantum_bound_violated: bool
    witness: bool

    def as_dict(self) -> dict:
        p = self.entry.point
        return {
            "family": self.entry.family, "kind": self.kind.value, "theta": list(self.entry.theta),
            "F": p.F, "G": p.G, "bounds": self.report.as_dict()["bounds"],
            "quantum_bound_violated": self.quantum_bound_violated, "g_witness": self.witness,
        }


def region_report(results: Sequence[FrontierResult]) -> list[RegionRow]:
    """Merged envelope over several families with bound evaluations per point.

    Every row is checked against the quantum-estimation tradeoff; for
    symbol-decoding families the row also carries ``G - F <= 1/8`` and the
    ``G > 2/3`` witness, and a violated quantum tradeoff is flagged.
    """
    if not results:
        raise ValueError("region_report needs at least one frontier result")
    dims = {r.d for r in results}
    if len(dims) != 1:
        raise DimensionError(f"cannot merge families of dimensions {sorted(dims)}")
    d = dims.pop()
    kinds = {}
    for r in results:
        kinds[r.family] = r.kind
    merged = pareto_envelope([e for r in results for e in r.envelope])
    quantum_ids = [BoundId.TRADEOFF_D2] if d == 2 else [BoundId.TRADEOFF_GENERAL]
    rows = []
    for e in merged:
        kind = kinds[e.family]
        ids = list(quantum_ids)
        if kind is EstimationKind.CLASSICAL:
            ids.append(BoundId.G_MINUS_F_EIGHTH)
        rep = evaluate(e.point, d, ids)
        violated = not rep[quantum_ids[0]].satisfied
        rows.append(RegionRow(e, kind, rep, violated, violation_witness_g(e.point)))
    return rows


# -- built-in families --------------------------------------------------------

def weak_family_family() -> DeviceFamily:
    return DeviceFamily("weak_family", (Param("lam", 0.0, 0.5),), weak_family, EstimationKind.QUANTUM, 2)


def breidbart_angle_family(encoding: ClassicalEncoding | None = None) -> DeviceFamily:
    """Projective decode in a basis rotated by ``angle`` in [0, pi/4], on BB84 by default."""
    return DeviceFamily("breidbart_angle", (Param("angle", 0.0, math.pi / 4),), breidbart,
                        EstimationKind.CLASSICAL, 2, encoding or bb84_encoding())


def _weak_rotated(lam: float, angle: float) -> RepeatingDevice:
    c, s = math.cos(angle), math.sin(angle)
    b0, b1 = np.array([c, s]), np.array([-s, c])
    a, b = math.sqrt(0.5 + lam), math.sqrt(max(0.5 - lam, 0.0))
    m0 = a * np.outer(b0, b0) + b * np.outer(b1, b1)
    m1 = b * np.outer(b0, b0) + a * np.outer(b1, b1)
    instr = MeasurementInstrument([(0, m0), (1, m1)])
    return RepeatingDevice(instr, EstimationRule.classical({0: 0, 1: 1}, 2), "weak_rotated")


def weak_rotated_family(encoding: ClassicalEncoding | None = None) -> DeviceFamily:
    """Weak measurement of strength ``lam`` along a rotated basis, decoding symbols."""
    return DeviceFamily("weak_rotated", (Param("lam", 0.0, 0.5), Param("angle", 0.0, math.pi / 4)),
                        _weak_rotated, EstimationKind.CLASSICAL, 2, encoding or bb84_encoding())


BUILTIN_FAMILIES = {
    "weak_family": weak_family_family,
    "breidbart_angle": breidbart_angle_family,
    "weak_rotated": weak_rotated_family,
}


def weak_family_g_at_f(f: float) -> float:
    """Closed-form best ``G`` of the weak family at transmission fidelity ``f``."""
    s = (3 * f - 2) / 2
    return 0.5 + math.sqrt(max(0.25 - s * s, 0.0)) / 3
