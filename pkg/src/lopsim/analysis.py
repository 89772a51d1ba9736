"""Bell-state discrimination error and parameter sweeps."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuits import (
    IDEAL_ETA,
    IDEAL_ETA_PRIME,
    BellKind,
    GateParams,
    append_bell_analyzer,
    bell_input_state,
    build_cnot,
    build_cnot_mismatch,
)
from .detection import RateTable, bell_pairs, coincidence_table
from .errors import DomainError
from .fock import transform_state

log = logging.getLogger(__name__)

BELL_ORDER = (BellKind.PSI_PLUS, BellKind.PSI_MINUS, BellKind.PHI_PLUS, BellKind.PHI_MINUS)

DEFAULT_ETA_RANGE = (0.28, 0.38, 101)
DEFAULT_ETA_PRIME_RANGE = (0.40, 0.60, 101)
DEFAULT_XI_RANGE = (0.8, 1.0, 201)


@dataclass(frozen=True)
class BellSignatureMap:
    """Which (control, target) detector pair flags each Bell state."""

    pairs: Mapping[BellKind, tuple[str, str]] = field(
        default_factory=lambda: {
            BellKind.PSI_PLUS: ("cS1", "tH"),
            BellKind.PSI_MINUS: ("cS2", "tH"),
            BellKind.PHI_PLUS: ("cS1", "tV"),
            BellKind.PHI_MINUS: ("cS2", "tV"),
        }
    )

    def __post_init__(self):
        if set(self.pairs) != set(BellKind) or len(set(self.pairs.values())) != 4:
            raise DomainError("signature map must pair each Bell state with a distinct detector pair")


def _short(label: str) -> str:
    # detector labels carry _O/_D suffixes that signatures leave out
    return label.split("_")[0]


def _signature_columns(table: RateTable, sig: BellSignatureMap) -> dict[BellKind, int]:
    by_pair = {(_short(a), _short(b)): col for col, (a, b) in enumerate(table.columns)}
    try:
        return {k: by_pair[pair] for k, pair in sig.pairs.items()}
    except KeyError as exc:
        raise DomainError(f"rate table has no column for detector pair {exc.args[0]}") from None


def bell_error_and_total(
    table: RateTable, kind: BellKind | str, sig: BellSignatureMap | None = None
) -> tuple[float, float]:
    """(error probability, total signature rate) for one Bell input row."""
    sig = sig or BellSignatureMap()
    kind = BellKind(kind)
    if kind.value not in table.rows:
        raise DomainError(f"rate table has no row for {kind.value}")
    columns = _signature_columns(table, sig)
    row = table.values[table.rows.index(kind.value)]
    rates = {k: float(row[c]) for k, c in columns.items()}
    total = sum(rates.values())
    if total == 0.0:
        return 0.0, 0.0
    return (total - rates[kind]) / total, total


def bell_errors(
    table: RateTable, sig: BellSignatureMap | None = None
) -> tuple[dict[BellKind, float], dict[BellKind, float]]:
    """Error probability and total signature rate for every Bell row of ``table``."""
    sig = sig or BellSignatureMap()
    columns = _signature_columns(table, sig)
    errors, totals = {}, {}
    for kind in BELL_ORDER:
        if kind.value not in table.rows:
            raise DomainError(f"rate table has no row for {kind.value}")
        row = table.values[table.rows.index(kind.value)]
        rates = {k: float(row[c]) for k, c in columns.items()}
        total = sum(rates.values())
        errors[kind] = 0.0 if total == 0.0 else (total - rates[kind]) / total
        totals[kind] = total
    return errors, totals


def bell_error_probability(
    table: RateTable, kind: BellKind | str, sig: BellSignatureMap | None = None
) -> float:
    """Wrong-signature coincidences over all four signature coincidences.

    A row with no signature coincidences at all yields 0; ``ErrorReport``
    records such rows as degenerate.
    """
    return bell_error_and_total(table, kind, sig)[0]


@dataclass(frozen=True)
class ErrorReport:
    eta: float
    eta_prime: float
    xi: float
    errors: Mapping[BellKind, float]
    totals: Mapping[BellKind, float]

    @property
    def degenerate(self) -> tuple[BellKind, ...]:
        return tuple(k for k in BELL_ORDER if self.totals[k] == 0.0)


def bell_rate_table(params: GateParams, mismatch: bool | None = None) -> RateTable:
    """Four Bell inputs through the gate plus analyzer, on the signature pairs.

    ``mismatch`` selects the 9-mode network; by default it is used only when
    ``xi < 1``.
    """
    if mismatch is None:
        mismatch = params.xi != 1.0
    builder = build_cnot_mismatch if mismatch else build_cnot
    transform, layout = builder(params)
    transform, layout = append_bell_analyzer(transform, layout)
    states = [(k.value, transform_state(bell_input_state(k, layout), transform)) for k in BELL_ORDER]
    return coincidence_table(states, bell_pairs(layout))


def error_report(params: GateParams, mismatch: bool | None = None) -> ErrorReport:
    errors, totals = bell_errors(bell_rate_table(params, mismatch))
    report = ErrorReport(params.eta, params.eta_prime, params.xi, errors, totals)
    if report.degenerate:
        log.warning("no signature coincidences for %s at %s", report.degenerate, params)
    return report


def grid(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 2 or not lo <= hi:
        raise DomainError(f"grid {lo}:{hi}:{count} needs lo <= hi and at least 2 points")
    if not (0.0 <= lo and hi <= 1.0):
        raise DomainError(f"grid {lo}:{hi} must lie within [0, 1]")
    return np.linspace(lo, hi, count)


def sweep_beamsplitter(
    eta_range: tuple[float, float, int] = DEFAULT_ETA_RANGE,
    eta_prime_range: tuple[float, float, int] = DEFAULT_ETA_PRIME_RANGE,
    xi: float = 1.0,
) -> list[ErrorReport]:
    """Error reports over an (eta, eta') grid, eta-major."""
    return [
        error_report(GateParams(float(eta), float(eta_p), xi))
        for eta in grid(*eta_range)
        for eta_p in grid(*eta_prime_range)
    ]


def sweep_mismatch(
    xi_range: tuple[float, float, int] = DEFAULT_XI_RANGE,
    eta: float = IDEAL_ETA,
    eta_prime: float = IDEAL_ETA_PRIME,
) -> list[ErrorReport]:
    # every point goes through the 9-mode network, including xi = 1
    return [
        error_report(GateParams(eta, eta_prime, float(xi)), mismatch=True)
        for xi in grid(*xi_range)
    ]
