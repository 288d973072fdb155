"""Quantum repeating devices and quantum seals as executable models.

The package computes transmission/estimation fidelities ``(F, G)`` of
measurement devices, readability/detection ``(alpha, beta)`` of seals, converts
between the two pictures, evaluates the known inequalities on both, and maps
achievable fidelity frontiers.
"""

__version__ = "0.1.0"

from .bounds import BoundId, evaluate, quantum_seal_bound_scenario, violation_witness_g
from .bridge import device_to_seal, seal_to_device, verify_equivalence
from .device import (
    UNIDENTIFIED,
    ClassicalEncoding,
    DiscreteAlphabet,
    EstimationKind,
    EstimationRule,
    HaarAlphabet,
    MeasurementInstrument,
    RepeatingDevice,
    TradeoffPoint,
    apply_instrument,
    average_fidelities_exact,
    average_fidelities_mc,
    builtin_device,
    builtin_encoding,
    classical_estimation_fidelity,
    estimation_fidelity_pointwise,
    transmission_fidelity_pointwise,
)
from .frontier import maximize_g_at_f, region_report, sweep
from .qcore import PureState, RngStream, haar_sample, inner, psd_sqrt
from .seal import SealPoint, SealProtocol, builtin_seal, detection_probability, evaluate_seal, readability
