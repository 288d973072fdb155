import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrepseal.device import EstimationKind, TradeoffPoint
from qrepseal.errors import DimensionError, InfeasibleError
from qrepseal.frontier import (
    BUILTIN_FAMILIES,
    DeviceFamily,
    FrontierEntry,
    FrontierResult,
    OptimizerConfig,
    breidbart_angle_family,
    maximize_g_at_f,
    pareto_envelope,
    region_report,
    sweep,
    weak_family_family,
    weak_family_g_at_f,
    weak_rotated_family,
)

points = st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=60)


def _entries(pairs):
    return [FrontierEntry("f", (float(i),), TradeoffPoint(F, G, 2, EstimationKind.QUANTUM))
            for i, (F, G) in enumerate(pairs)]


def _dominates(a, b):
    return (a.F > b.F and a.G >= b.G) or (a.F >= b.F and a.G > b.G)


@given(points)
def test_envelope_not_dominated(pairs):
    entries = _entries(pairs)
    env = pareto_envelope(entries)
    assert env
    for e in env:
        assert not any(_dominates(o.point, e.point) for o in entries)


@given(points)
def test_envelope_sorted_and_bucketed(pairs):
    env = pareto_envelope(_entries(pairs))
    fs = [e.point.F for e in env]
    assert fs == sorted(fs)
    buckets = [math.floor(f / 1e-3) for f in fs]
    assert len(set(buckets)) == len(buckets)


def test_duplicate_family_is_idempotent():
    fr = sweep(weak_family_family(), 21)
    assert pareto_envelope(fr.points + fr.points) == pareto_envelope(fr.points)


def test_weak_sweep_on_curve():
    fr = sweep(weak_family_family(), 101)
    assert len(fr.points) == 101
    for e in fr.points:
        lhs = (e.point.F - 2 / 3) ** 2 + 4 * (e.point.G - 0.5) ** 2
        assert abs(lhs - 1 / 9) <= 1e-10


@pytest.mark.parametrize("f", np.linspace(2 / 3, 1.0, 10))
def test_optimizer_recovers_weak_curve(f):
    res = maximize_g_at_f(weak_family_family(), float(f))
    assert res.point.G == pytest.approx(weak_family_g_at_f(float(f)), abs=1e-5)
    assert res.point.F >= f - 1e-9
    # refinement never does worse than its best seed
    assert res.objective >= res.seed_objective


def test_optimizer_two_parameter_family():
    fam = weak_rotated_family()
    res = maximize_g_at_f(fam, 0.75, OptimizerConfig(seed_grid=11))
    grid_best = max((e.point.G for e in sweep(fam, 11).points if e.point.F >= 0.75), default=-1)
    assert res.point.G >= grid_best - 1e-12
    assert res.point.F >= 0.75 - 1e-9


def test_infeasible_target():
    with pytest.raises(InfeasibleError):
        maximize_g_at_f(breidbart_angle_family(), 0.9)
    with pytest.raises(InfeasibleError):
        maximize_g_at_f(weak_family_family(), 1.1)


def test_breidbart_sweep_peaks_at_pi_over_8():
    fr = sweep(breidbart_angle_family(), 101)
    best = max(fr.points, key=lambda e: e.point.G)
    assert abs(best.theta[0] - math.pi / 8) <= (math.pi / 4) / 100
    assert best.point.G == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-12)
    assert all(e.point.F == pytest.approx(0.75, abs=1e-12) for e in fr.points)


def test_region_report_flags_classical_violations():
    rows = region_report([sweep(weak_family_family(), 101), sweep(breidbart_angle_family(), 101)])
    classical = [r for r in rows if r.kind is EstimationKind.CLASSICAL]
    quantum = [r for r in rows if r.kind is EstimationKind.QUANTUM]
    assert classical and quantum
    assert any(r.quantum_bound_violated and r.witness for r in classical)
    assert not any(r.quantum_bound_violated for r in quantum)
    for r in rows:
        d = r.as_dict()
        assert d["family"] in BUILTIN_FAMILIES


def test_region_report_rejects_mixed_dims():
    other = FrontierResult("x", EstimationKind.QUANTUM, 3, [], [])
    with pytest.raises(DimensionError):
        region_report([sweep(weak_family_family(), 5), other])


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 0.5), st.floats(0, math.pi / 4))
def test_family_builders_produce_valid_devices(lam, angle):
    pt = weak_rotated_family().evaluate((lam, angle))
    assert 0 <= pt.F <= 1 and 0 <= pt.G <= 1
    pt = weak_family_family().evaluate((lam,))
    assert (pt.F - 2 / 3) ** 2 + 4 * (pt.G - 0.5) ** 2 == pytest.approx(1 / 9, abs=1e-10)


def test_family_error_names_theta():
    fam = DeviceFamily("bad", weak_family_family().params, weak_family_family().builder,
                       EstimationKind.QUANTUM, 2)
    with pytest.raises(Exception, match="bad at theta"):
        fam.evaluate((0.9,))
