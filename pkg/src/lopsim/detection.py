"""Coincidence post-selection and detector-group count moments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .circuits import CircuitLayout
from .errors import DomainError
from .fock import PureState, norm

EMPTY_POSTSELECTION_TOL = 1e-15


@dataclass(frozen=True)
class DetectorGroup:
    """Output modes whose photon numbers a single physical detector sums."""

    label: str
    modes: tuple[int, ...]

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        if not modes:
            raise DomainError(f"detector {self.label!r} watches no modes")
        if len(set(modes)) != len(modes):
            raise DomainError(f"detector {self.label!r} lists a mode twice")
        object.__setattr__(self, "modes", modes)

    def count(self, occupations: Sequence[int]) -> int:
        return sum(occupations[m] for m in self.modes)


@dataclass(frozen=True)
class RateTable:
    rows: tuple[str, ...]
    columns: tuple[tuple[str, str], ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.rows), len(self.columns)):
            raise DomainError(f"table shape {values.shape} does not match its labels")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def get(self, row: str, column: tuple[str, str]) -> float:
        try:
            return float(self.values[self.rows.index(row), self.columns.index(tuple(column))])
        except ValueError:
            raise DomainError(f"no entry for row {row!r}, column {column!r}") from None

    def column_labels(self) -> list[str]:
        return [f"{a}:{b}" for a, b in self.columns]


class Postselection(NamedTuple):
    state: PureState | None
    probability: float

    @property
    def empty(self) -> bool:
        return self.state is None


def _check_disjoint(a: DetectorGroup, b: DetectorGroup) -> None:
    if set(a.modes) & set(b.modes):
        raise DomainError(f"detector groups {a.label!r} and {b.label!r} overlap")


def _check_range(group: DetectorGroup, mode_count: int) -> None:
    for m in group.modes:
        if not 0 <= m < mode_count:
            raise DomainError(f"detector {group.label!r} mode {m} out of range for {mode_count} modes")


def coincidence_rate(state: PureState, a: DetectorGroup, b: DetectorGroup) -> float:
    """<(sum_a n)(sum_b n)> evaluated on the Fock-basis probabilities.

    Bunched events on one group contribute zero since the other group is then
    empty.
    """
    _check_disjoint(a, b)
    _check_range(a, state.mode_count)
    _check_range(b, state.mode_count)
    occ, probs = state.arrays
    weights = occ[:, list(a.modes)].sum(axis=1) * occ[:, list(b.modes)].sum(axis=1)
    # arrays are in sorted ket order, so the sum does not depend on dict order
    return float(probs @ weights)


def coincidence_table(
    states: Sequence[tuple[str, PureState]],
    pairs: Sequence[tuple[DetectorGroup, DetectorGroup]],
) -> RateTable:
    groups = list(dict.fromkeys(g for pair in pairs for g in pair))
    slot = {g: i for i, g in enumerate(groups)}
    for a, b in pairs:
        _check_disjoint(a, b)
    left = [slot[a] for a, _ in pairs]
    right = [slot[b] for _, b in pairs]
    values = []
    indicators = {}
    for _, state in states:
        n = state.mode_count
        if n not in indicators:
            indicators[n] = np.zeros((n, len(groups)))
            for i, g in enumerate(groups):
                _check_range(g, n)
                indicators[n][list(g.modes), i] = 1.0
        indicator = indicators[n]
        occ, probs = state.arrays
        counts = occ @ indicator
        values.append(probs @ (counts[:, left] * counts[:, right]))
    return RateTable(
        rows=tuple(label for label, _ in states),
        columns=tuple((a.label, b.label) for a, b in pairs),
        values=np.array(values, dtype=float).reshape(len(states), len(pairs)),
    )


def postselect_coincidence(
    state: PureState, control: Iterable[int], target: Iterable[int]
) -> Postselection:
    """Keep kets with exactly one photon in ``control`` and one in ``target``.

    Returns the renormalized kept part and its probability.  When nothing
    survives (probability below 1e-15) the state is ``None``.
    """
    control = set(control)
    target = set(target)
    if control & target:
        raise DomainError("control and target mode sets overlap")
    kept = {}
    for occ, amp in state.terms.items():
        if sum(occ[m] for m in control) == 1 and sum(occ[m] for m in target) == 1:
            kept[occ] = amp
    part = PureState(state.mode_count, kept)
    probability = norm(part) ** 2
    if probability < EMPTY_POSTSELECTION_TOL:
        return Postselection(None, probability)
    return Postselection(part.normalized(), probability)


def standard_groups(layout: CircuitLayout) -> dict[str, DetectorGroup]:
    """Detector groups of the CNOT layouts, keyed by detector label.

    On the mismatch gate each detector also collects the mismatch mode that
    lands on it (``cV`` with ``cV_m``, ``tH`` with ``tH_m``, ...).
    """
    if layout.kind not in ("cnot", "cnot_mismatch"):
        raise DomainError(f"no standard detectors for a {layout.kind!r} layout")
    mismatch = layout.kind == "cnot_mismatch"

    def group(label, *names):
        return DetectorGroup(label, tuple(layout.index(n) for n in names))

    groups = {}
    if mismatch:
        groups["tH"] = group("tH_D", "tH_O", "tH_m")
        groups["tV"] = group("tV_D", "tV_O", "tV_m")
    else:
        groups["tH"] = group("tH_O", "tH_O")
        groups["tV"] = group("tV_O", "tV_O")
    if layout.analyzer:
        if mismatch:
            groups["cS1"] = group("cS1", "cS1", "cS1M")
            groups["cS2"] = group("cS2", "cS2", "cS2M")
        else:
            groups["cS1"] = group("cS1", "cS1")
            groups["cS2"] = group("cS2", "cS2")
    elif mismatch:
        groups["cH"] = group("cH_D", "cH_O")
        groups["cV"] = group("cV_D", "cV_O", "cV_m")
    else:
        groups["cH"] = group("cH_O", "cH_O")
        groups["cV"] = group("cV_O", "cV_O")
    return groups


def logical_pairs(layout: CircuitLayout) -> list[tuple[DetectorGroup, DetectorGroup]]:
    g = standard_groups(layout)
    return [(g["cH"], g["tH"]), (g["cH"], g["tV"]), (g["cV"], g["tH"]), (g["cV"], g["tV"])]


def bell_pairs(layout: CircuitLayout) -> list[tuple[DetectorGroup, DetectorGroup]]:
    """Pairs in signature order: (cS1,tH), (cS2,tH), (cS1,tV), (cS2,tV)."""
    g = standard_groups(layout)
    return [(g["cS1"], g["tH"]), (g["cS2"], g["tH"]), (g["cS1"], g["tV"]), (g["cS2"], g["tV"])]
