"""The coincidence-basis CNOT networks, its Bell analyzer and input states.

Mode order of the 6-mode gate is ``cH cV tH tV vc vt``; the mode-mismatch gate
appends ``v1 v2 v3`` and the mismatch-aware Bell analyzer appends ``v4``.

Bell-state naming swaps the usual convention: ``psi+-`` are ``(|HH> +- |VV>)/sqrt2`` and ``phi+-`` are
``(|HV> +- |VH>)/sqrt2``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError
from .fock import PureState, single_photon_state
from .network import (
    FlipPort,
    ModeTransform,
    beamsplitter_matrix,
    compose,
    embed_modes,
    embed_two_mode,
    mode_match_matrix,
)

IDEAL_ETA = 1.0 / 3.0
IDEAL_ETA_PRIME = 0.5

GATE_MODES = ("cH", "cV", "tH", "tV", "vc", "vt")
GATE_OUTPUTS = ("cH_O", "cV_O", "tH_O", "tV_O", "vc_O", "vt_O")
MISMATCH_MODES = ("v1", "v2", "v3")
MISMATCH_OUTPUTS = ("cV_m", "tH_m", "tV_m")


class BellKind(str, Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"


LOGICAL_INPUTS = ("HH", "HV", "VH", "VV")


@dataclass(frozen=True)
class CircuitLayout:
    """Names for the input modes and for the output modes at the same indices."""

    modes: tuple[str, ...]
    outputs: tuple[str, ...]
    kind: str = "custom"
    analyzer: bool = False
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.modes) != len(self.outputs):
            raise DomainError("layout needs one output name per mode")
        lookup = {}
        for names in (self.modes, self.outputs):
            if len(set(names)) != len(names):
                raise DomainError(f"duplicate mode names in {names}")
            for i, name in enumerate(names):
                if name in lookup and lookup[name] != i:
                    raise DomainError(f"name {name!r} refers to two different modes")
                lookup[name] = i
        object.__setattr__(self, "_lookup", lookup)

    @property
    def mode_count(self) -> int:
        return len(self.modes)

    def index(self, name: str) -> int:
        try:
            return self._lookup[name]
        except KeyError:
            raise DomainError(f"no mode named {name!r} in layout") from None

    def indices(self, names) -> list[int]:
        return [self.index(n) for n in names]


@dataclass(frozen=True)
class GateParams:
    eta: float = IDEAL_ETA
    eta_prime: float = IDEAL_ETA_PRIME
    xi: float = 1.0

    def __post_init__(self):
        for name in ("eta", "eta_prime", "xi"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


def _gate_stages(n: int, params: GateParams, cv: int) -> list[ModeTransform]:
    """B3, then B1/B2/B5, then B4 on the primary arms.

    ``cv`` is the mode that meets B2's second port (``cV`` itself, or its
    matched component when a mode-match rotation precedes B2).

    B4 is mounted reversed relative to B3: with the same reflectivity the
    target interferometer's straight-through amplitude is 2 sqrt(eta'(1-eta'))
    and it leaks 1 - 2 eta' into the other rail, so the 50:50 pair only
    cancels at eta' = 1/2.  In the shared port parameterization that is a
    reflectivity of ``1 - eta'``; both agree at the ideal point.
    """
    ch, _, th, tv, vc, vt = range(6)
    eta, eta_p = params.eta, params.eta_prime
    return [
        embed_two_mode(n, th, tv, beamsplitter_matrix(eta_p, FlipPort.SECOND)),  # B3
        embed_two_mode(n, ch, vc, beamsplitter_matrix(eta, FlipPort.SECOND)),  # B1
        embed_two_mode(n, th, cv, beamsplitter_matrix(eta, FlipPort.SECOND)),  # B2
        embed_two_mode(n, tv, vt, beamsplitter_matrix(eta, FlipPort.SECOND)),  # B5
        embed_two_mode(n, th, tv, b4_matrix(eta_p)),  # B4
    ]


def b4_matrix(eta_prime: float) -> np.ndarray:
    return beamsplitter_matrix(1.0 - eta_prime, FlipPort.SECOND)


def build_cnot(params: GateParams | None = None) -> tuple[ModeTransform, CircuitLayout]:
    params = params or GateParams()
    if params.xi != 1.0:
        raise DomainError("build_cnot models perfect mode matching; use build_cnot_mismatch")
    layout = CircuitLayout(GATE_MODES, GATE_OUTPUTS, kind="cnot")
    return compose(*_gate_stages(6, params, cv=1)), layout


def build_cnot_mismatch(params: GateParams | None = None) -> tuple[ModeTransform, CircuitLayout]:
    """9-mode gate in which part of the ``cV`` photon misses the central beamsplitter.

    The mismatched component (carried in the ``v1`` slot) passes through a
    copy of B2 together with ``v2`` and then a copy of B4 together with
    ``v3``; it lands on the same detectors as the primary outputs.
    """
    params = params or GateParams()
    n = 9
    cv, v1, v2, v3 = 1, 6, 7, 8
    stages = _gate_stages(n, params, cv=cv)
    mode_match = embed_two_mode(n, cv, v1, mode_match_matrix(params.xi))
    b2_copy = embed_two_mode(n, v2, v1, beamsplitter_matrix(params.eta, FlipPort.SECOND))
    b4_copy = embed_two_mode(n, v2, v3, b4_matrix(params.eta_prime))
    transform = compose(stages[0], mode_match, *stages[1:3], b2_copy, stages[3], stages[4], b4_copy)
    layout = CircuitLayout(
        GATE_MODES + MISMATCH_MODES, GATE_OUTPUTS + MISMATCH_OUTPUTS, kind="cnot_mismatch"
    )
    return transform, layout


def append_bell_analyzer(
    transform: ModeTransform, layout: CircuitLayout
) -> tuple[ModeTransform, CircuitLayout]:
    """Mix the control outputs on a 50:50 beamsplitter before detection.

    ``cS1 = (cH_O + cV_O)/sqrt2`` replaces ``cH_O`` and ``cS2`` replaces
    ``cV_O``.  On the mismatch gate an extra vacuum mode ``v4`` mixes with
    ``cV_m`` to give ``cS1M`` (in the ``v4`` slot) and ``cS2M``.
    """
    if layout.analyzer or layout.kind not in ("cnot", "cnot_mismatch"):
        raise DomainError(f"cannot append a Bell analyzer to a {layout.kind!r} layout")
    half = beamsplitter_matrix(0.5, FlipPort.SECOND)
    ch, cv = layout.index("cH_O"), layout.index("cV_O")
    outputs = list(layout.outputs)
    outputs[ch], outputs[cv] = "cS1", "cS2"
    if layout.kind == "cnot":
        stage = embed_two_mode(layout.mode_count, ch, cv, half)
        return compose(transform, stage), CircuitLayout(
            layout.modes, tuple(outputs), kind=layout.kind, analyzer=True
        )

    n = layout.mode_count + 1
    widened = embed_modes(n, range(layout.mode_count), transform.matrix)
    cvm, v4 = layout.index("cV_m"), layout.mode_count
    outputs[cvm] = "cS2M"
    outputs.append("cS1M")
    stage = compose(embed_two_mode(n, ch, cv, half), embed_two_mode(n, v4, cvm, half))
    return compose(widened, stage), CircuitLayout(
        layout.modes + ("v4",), tuple(outputs), kind=layout.kind, analyzer=True
    )


def logical_input_state(
    alpha: complex, beta: complex, gamma: complex, delta: complex, layout: CircuitLayout
) -> PureState:
    """alpha|HH> + beta|HV> + gamma|VH> + delta|VV>, ancillas in vacuum.

    The coefficient vector is normalized here, so callers may pass values that
    are only approximately unit length.
    """
    coeffs = np.array([alpha, beta, gamma, delta], dtype=complex)
    size = float(np.linalg.norm(coeffs))
    if size == 0.0:
        raise DomainError("logical input coefficients are all zero")
    coeffs = coeffs / size
    pairs = [("cH", "tH"), ("cH", "tV"), ("cV", "tH"), ("cV", "tV")]
    terms = {}
    for c, (ctrl, tgt) in zip(coeffs, pairs):
        if c == 0:
            continue
        ket = single_photon_state(layout.mode_count, layout.indices((ctrl, tgt)))
        (occ,) = ket.terms
        terms[occ] = c
    return PureState(layout.mode_count, terms)


def logical_basis_state(label: str, layout: CircuitLayout) -> PureState:
    """One of ``HH``, ``HV``, ``VH``, ``VV``."""
    if label not in LOGICAL_INPUTS:
        raise DomainError(f"unknown logical input {label!r}")
    coeffs = [0.0] * 4
    coeffs[LOGICAL_INPUTS.index(label)] = 1.0
    return logical_input_state(*coeffs, layout)


_BELL_COEFFS = {
    BellKind.PSI_PLUS: (1, 0, 0, 1),
    BellKind.PSI_MINUS: (1, 0, 0, -1),
    BellKind.PHI_PLUS: (0, 1, 1, 0),
    BellKind.PHI_MINUS: (0, 1, -1, 0),
}


def bell_input_state(kind: BellKind | str, layout: CircuitLayout) -> PureState:
    return _bell_input_state(BellKind(kind), layout)


@lru_cache(maxsize=64)
def _bell_input_state(kind: BellKind, layout: CircuitLayout) -> PureState:
    s = 1.0 / math.sqrt(2.0)
    return logical_input_state(*(s * c for c in _BELL_COEFFS[kind]), layout)
