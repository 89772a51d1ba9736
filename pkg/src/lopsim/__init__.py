"""Exact few-photon simulation of linear-optical mode networks.

Reproduces the two-photon coincidence-basis CNOT gate, its Bell-state
analyzer, and its error behaviour under beamsplitter-ratio and mode-matching
imperfections.
"""

__version__ = "0.1.0"

from .errors import DomainError
from .network import (
    BeamsplitterSpec,
    FlipPort,
    ModeTransform,
    beamsplitter_matrix,
    compose,
    embed_modes,
    embed_two_mode,
    is_unitary,
    mode_match_matrix,
    unitarity_defect,
)
from .fock import (
    FockBasisState,
    PureState,
    amplitude_oracle,
    inner_product,
    norm,
    permanent,
    single_photon_state,
    transform_state,
)
from .circuits import (
    BellKind,
    CircuitLayout,
    GateParams,
    append_bell_analyzer,
    bell_input_state,
    build_cnot,
    build_cnot_mismatch,
    logical_input_state,
)
from .detection import (
    DetectorGroup,
    RateTable,
    coincidence_rate,
    coincidence_table,
    postselect_coincidence,
)
from .analysis import (
    BellSignatureMap,
    ErrorReport,
    bell_error_probability,
    sweep_beamsplitter,
    sweep_mismatch,
)
from .dsl import CircuitDescription, DslError, lower, parse_circuit, serialize
