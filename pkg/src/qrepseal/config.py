"""Scenario configuration schema and builders from config fragments to model objects.

Configs are JSON documents. Complex numbers are ``[re, im]`` pairs, states are
lists of such pairs, matrices are row-major lists of rows. Unknown keys are
rejected everywhere.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import device as dv
from . import seal as sl
from .errors import ConfigError
from .frontier import BUILTIN_FAMILIES
from .qcore import PureState

Complex = tuple[float, float]


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def to_state(pairs: list[Complex]) -> PureState:
    return PureState([complex(re, im) for re, im in pairs])


def to_matrix(rows: list[list[Complex]]) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def from_complex(values) -> list:
    """Inverse of :func:`to_state` / :func:`to_matrix` for report echoing."""
    arr = np.asarray(values)
    if arr.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in arr]
    return [from_complex(row) for row in arr]


class KrausEntry(Strict):
    label: Union[int, str]
    matrix: list[list[Complex]]
    estimate: Optional[list[Complex]] = None
    decode: Optional[int] = None


class InlineDevice(Strict):
    kraus: list[KrausEntry] = Field(min_length=1)
    kind: Literal["quantum", "classical"]
    m: int = 2

    def build(self) -> dv.RepeatingDevice:
        instr = dv.MeasurementInstrument([(e.label, to_matrix(e.matrix)) for e in self.kraus])
        if self.kind == "quantum":
            missing = [e.label for e in self.kraus if e.estimate is None]
            if missing:
                raise ConfigError(f"quantum device needs an estimate for outcomes {missing}")
            rule = dv.EstimationRule.quantum({e.label: to_state(e.estimate) for e in self.kraus})
        else:
            rule = dv.EstimationRule.classical({e.label: e.decode for e in self.kraus}, self.m)
        return dv.RepeatingDevice(instr, rule, "inline")


class DeviceRef(Strict):
    builtin: Optional[str] = None
    params: dict[str, Union[bool, int, float]] = {}
    inline: Optional[InlineDevice] = None
    as_classical: bool = False

    @model_validator(mode="after")
    def _one_source(self):
        if (self.builtin is None) == (self.inline is None):
            raise ValueError("give exactly one of 'builtin' or 'inline'")
        return self

    def build(self) -> dv.RepeatingDevice:
        dev = dv.builtin_device(self.builtin, **self.params) if self.builtin else self.inline.build()
        return dv.classical_view(dev) if self.as_classical and dev.kind is dv.EstimationKind.QUANTUM else dev


class WeightedState(Strict):
    state: list[Complex]
    prob: float = Field(ge=0)


class InlineEncoding(Strict):
    table: list[list[WeightedState]] = Field(min_length=1)
    prior: Optional[list[float]] = None

    def build(self) -> dv.ClassicalEncoding:
        m = len(self.table)
        rows = [[(to_state(w.state), w.prob) for w in row] for row in self.table]
        return dv.ClassicalEncoding(m, rows, self.prior or [1.0 / m] * m)


class EncodingRef(Strict):
    builtin: Optional[str] = None
    params: dict[str, int] = {}
    inline: Optional[InlineEncoding] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.builtin is None) == (self.inline is None):
            raise ValueError("give exactly one of 'builtin' or 'inline'")
        return self

    def build(self) -> dv.ClassicalEncoding:
        return dv.builtin_encoding(self.builtin, **self.params) if self.builtin else self.inline.build()


class AlphabetRef(Strict):
    haar: Optional[int] = None
    discrete: Optional[list[WeightedState]] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.haar is None) == (self.discrete is None):
            raise ValueError("give exactly one of 'haar' or 'discrete'")
        return self

    def build(self):
        if self.haar is not None:
            return dv.HaarAlphabet(self.haar)
        return dv.DiscreteAlphabet([to_state(w.state) for w in self.discrete], [w.prob for w in self.discrete])


class InlineSeal(Strict):
    dim_alice: int = Field(ge=1)
    dim_bob: int = Field(ge=2)
    encodings: list[list[WeightedState]] = Field(min_length=1)
    decoder: list[KrausEntry] = Field(min_length=1)
    prior: Optional[list[float]] = None

    def build(self) -> sl.SealProtocol:
        enc = [[(to_state(w.state), w.prob) for w in row] for row in self.encodings]
        instr = dv.MeasurementInstrument([(e.label, to_matrix(e.matrix)) for e in self.decoder])
        return sl.SealProtocol(self.dim_alice, self.dim_bob, enc, instr,
                               {e.label: e.decode for e in self.decoder}, self.prior, name="inline")


class SealRef(Strict):
    builtin: Optional[str] = None
    inline: Optional[InlineSeal] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.builtin is None) == (self.inline is None):
            raise ValueError("give exactly one of 'builtin' or 'inline'")
        return self

    def build(self) -> sl.SealProtocol:
        return sl.builtin_seal(self.builtin) if self.builtin else self.inline.build()


class PointSpec(Strict):
    F: Optional[float] = Field(default=None, ge=0, le=1)
    G: Optional[float] = Field(default=None, ge=0, le=1)
    alpha: Optional[float] = Field(default=None, ge=0, le=1)
    beta: Optional[float] = Field(default=None, ge=0, le=1)
    kind: Literal["quantum", "classical", "seal"] = "quantum"

    @model_validator(mode="after")
    def _pair(self):
        fg = self.F is not None and self.G is not None
        ab = self.alpha is not None and self.beta is not None
        if fg == ab:
            raise ValueError("give either F and G, or alpha and beta")
        return self


class FrontierSpec(Strict):
    family: str
    grid: Union[int, list[int]] = 101
    f_min: list[float] = []

    @model_validator(mode="after")
    def _known(self):
        if self.family not in BUILTIN_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; known: {sorted(BUILTIN_FAMILIES)}")
        return self


class Sampling(Strict):
    n: int = Field(default=100_000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)


class Tolerances(Strict):
    exact: float = Field(default=1e-12, gt=0)
    mc: Optional[float] = Field(default=None, gt=0)


class OutputSpec(Strict):
    dir: Optional[str] = None
    stem: str = "report"


class ScenarioConfig(Strict):
    scenario: Literal["device", "seal", "bridge", "bounds", "frontier", "verify-all", "paper-table"]
    device: Optional[DeviceRef] = None
    encoding: Optional[EncodingRef] = None
    alphabet: Optional[AlphabetRef] = None
    seal: Optional[SealRef] = None
    point: Optional[PointSpec] = None
    d: Optional[int] = Field(default=None, ge=2)
    frontier: Optional[list[FrontierSpec]] = None
    modes: list[Literal["exact", "mc"]] = ["exact"]
    bounds: Optional[list[str]] = None
    assert_bounds: bool = False
    sampling: Sampling = Sampling()
    tolerances: Tolerances = Tolerances()
    output: OutputSpec = OutputSpec()

    @model_validator(mode="after")
    def _required_parts(self):
        need = {
            "device": ["device"],
            "seal": ["seal"],
            "bounds": ["point", "d"],
            "frontier": ["frontier"],
        }.get(self.scenario, [])
        missing = [k for k in need if getattr(self, k) is None]
        if missing:
            raise ValueError(f"scenario {self.scenario!r} requires {missing}")
        if self.scenario == "bridge" and self.seal is None and (self.device is None or self.encoding is None):
            raise ValueError("scenario 'bridge' requires 'seal', or 'device' and 'encoding'")
        return self


def format_validation_error(exc: ValidationError) -> str:
    """One diagnostic line per error: dotted field path and message."""
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "\n".join(lines)


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a JSON config; raises :class:`ConfigError` with diagnostics."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(format_validation_error(exc)) from None
