"""Few-photon Fock states over labelled modes and their propagation.

States are sparse maps from occupation vectors to complex amplitudes over an
orthonormal basis, so a doubly occupied mode ``|2>`` is the normalized ket
``(a^dagger)^2 / sqrt(2) |0>``.

Propagation convention: a ``ModeTransform`` row ``j`` expands output operator
``j`` over the input operators, ``b_j = sum_k U[j, k] a_k``.  An input photon
created by ``a_k^dagger`` therefore leaves the network as
``sum_j U[j, k] b_j^dagger``, i.e. it follows column ``k`` of the matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DomainError
from .network import ModeTransform

FockBasisState = tuple[int, ...]

_FAST_PATH_MAX_PHOTONS = 2


@dataclass(frozen=True)
class PureState:
    """Normalized (by construction, not enforcement) sparse pure state."""

    mode_count: int
    terms: Mapping[FockBasisState, complex] = field(default_factory=dict)

    def __post_init__(self):
        terms = {}
        for occ, amp in self.terms.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != self.mode_count:
                raise DomainError(
                    f"ket {occ} has {len(occ)} modes, state has {self.mode_count}"
                )
            if any(n < 0 for n in occ):
                raise DomainError(f"negative occupation in {occ}")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise DomainError(f"non-finite amplitude for {occ}")
            terms[occ] = terms.get(occ, 0j) + amp
        object.__setattr__(self, "terms", terms)

    @classmethod
    def _trusted(cls, mode_count: int, terms: dict[FockBasisState, complex]) -> PureState:
        # internal results are already well-formed
        state = object.__new__(cls)
        object.__setattr__(state, "mode_count", mode_count)
        object.__setattr__(state, "terms", terms)
        return state

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(occupations, probabilities) as arrays, rows in sorted ket order."""
        kets = sorted(self.terms)
        occ = np.array(kets, dtype=float).reshape(len(kets), self.mode_count)
        amps = np.array([self.terms[k] for k in kets], dtype=complex)
        return occ, amps.real**2 + amps.imag**2

    @classmethod
    def vacuum(cls, mode_count: int) -> PureState:
        return cls(mode_count, {(0,) * mode_count: 1.0})

    def amplitude(self, occupations: Iterable[int]) -> complex:
        return self.terms.get(tuple(occupations), 0j)

    def items(self) -> Iterator[tuple[FockBasisState, complex]]:
        """Terms sorted lexicographically by occupation vector."""
        for occ in sorted(self.terms):
            yield occ, self.terms[occ]

    def photon_numbers(self) -> set[int]:
        return {sum(occ) for occ in self.terms}

    def scaled(self, factor: complex) -> PureState:
        return PureState(self.mode_count, {k: factor * v for k, v in self.terms.items()})

    def __add__(self, other: PureState) -> PureState:
        _check_modes(self, other)
        terms = dict(self.terms)
        for occ, amp in other.terms.items():
            terms[occ] = terms.get(occ, 0j) + amp
        return PureState(self.mode_count, terms)

    def normalized(self) -> PureState:
        n = norm(self)
        if n == 0.0:
            raise DomainError("cannot normalize the zero state")
        return self.scaled(1.0 / n)

    def probabilities(self) -> dict[FockBasisState, float]:
        return {occ: abs(amp) ** 2 for occ, amp in self.items()}


def _check_modes(a: PureState, b: PureState) -> None:
    if a.mode_count != b.mode_count:
        raise DomainError(f"mode count mismatch: {a.mode_count} vs {b.mode_count}")


def basis_ket(occupations: Iterable[int]) -> PureState:
    occ = tuple(occupations)
    return PureState(len(occ), {occ: 1.0})


def single_photon_state(mode_count: int, occupied: Iterable[int]) -> PureState:
    """Basis ket with one photon per listed mode index.

    Repeating an index puts two photons in that mode; an empty list gives the
    vacuum.
    """
    occupied = list(occupied)
    occ = [0] * mode_count
    for k in occupied:
        if not 0 <= k < mode_count:
            raise DomainError(f"mode index {k} out of range for {mode_count} modes")
        occ[k] += 1
    return basis_ket(occ)


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    _check_modes(a, b)
    small, large = (a, b) if len(a.terms) <= len(b.terms) else (b, a)
    total = 0j
    for occ in small.terms:
        if occ in large.terms:
            total += a.terms[occ].conjugate() * b.terms[occ]
    return total


def norm(state: PureState) -> float:
    return math.sqrt(sum(abs(amp) ** 2 for amp in state.terms.values()))


def _modes_of(occ: FockBasisState) -> list[int]:
    """Expand an occupation vector into a sorted list of mode indices."""
    return [k for k, n in enumerate(occ) for _ in range(n)]


def _bosonic_factor(occ: FockBasisState) -> float:
    return math.prod(math.factorial(n) for n in occ)


@lru_cache(maxsize=None)
def _low_photon_kets(n_modes: int) -> tuple:
    """Ket table for the direct expansion, cached per mode count.

    Order: vacuum, single photons, one photon in each of j < k (in the order
    of the returned upper-triangle indices), then doubly occupied modes.
    """
    def ket(*modes):
        occ = [0] * n_modes
        for m in modes:
            occ[m] += 1
        return tuple(occ)

    rows, cols = np.triu_indices(n_modes, 1)
    kets = [(0,) * n_modes]
    kets += [ket(j) for j in range(n_modes)]
    kets += [ket(j, k) for j, k in zip(rows, cols)]
    kets += [ket(j, j) for j in range(n_modes)]
    return tuple(kets), (rows, cols)


_SQRT2 = math.sqrt(2.0)


def _expand_low_photon(
    matrix: np.ndarray, terms: list[tuple[FockBasisState, complex]], out: dict[FockBasisState, complex]
) -> None:
    """Add the images of all terms with at most two photons to ``out``.

    Each term is the monomial ``amp * prod_k (a_k^dagger)^n_k / sqrt(n_k!)``.
    Substituting the output expansion of every creation operator and
    collecting coefficients gives a vector (one photon) and a matrix ``poly``
    whose entry (j, k) multiplies ``b_j^dagger b_k^dagger`` (two photons).
    """
    if not terms:
        return
    n = matrix.shape[0]
    vacuum = 0j
    single = np.zeros(n, dtype=complex)
    poly = np.zeros((n, n), dtype=complex)
    for occ, amp in terms:
        photons = _modes_of(occ)
        if not photons:
            vacuum += amp
        elif len(photons) == 1:
            single += amp * matrix[:, photons[0]]
        else:
            a, b = photons
            weight = amp / math.sqrt(_bosonic_factor(occ))
            poly += weight * np.outer(matrix[:, a], matrix[:, b])

    kets, (rows, cols) = _low_photon_kets(n)
    coeffs = np.concatenate((
        [vacuum],
        single,
        poly[rows, cols] + poly[cols, rows],
        # (b_j^dagger)^2 |0> = sqrt(2) |2_j>
        np.diagonal(poly) * _SQRT2,
    ))
    nonzero = np.flatnonzero(coeffs)
    for i, c in zip(nonzero.tolist(), coeffs[nonzero].tolist()):
        ket = kets[i]
        out[ket] = out.get(ket, 0j) + c


def transform_state(state: PureState, transform: ModeTransform) -> PureState:
    """Propagate ``state`` through ``transform``.

    Terms with at most two photons are expanded directly; heavier terms are
    assembled from permanent amplitudes over every output ket of the same
    photon number.
    """
    if transform.mode_count != state.mode_count:
        raise DomainError(
            f"transform acts on {transform.mode_count} modes, state has {state.mode_count}"
        )
    out: dict[FockBasisState, complex] = {}
    low, high = [], []
    for occ, amp in state.items():
        (low if sum(occ) <= _FAST_PATH_MAX_PHOTONS else high).append((occ, amp))
    _expand_low_photon(transform.matrix, low, out)
    for occ, amp in high:
        for target in fock_basis(state.mode_count, sum(occ)):
            c = amplitude_oracle(transform, occ, target)
            if c != 0:
                out[target] = out.get(target, 0j) + amp * c
    return PureState._trusted(state.mode_count, {k: v for k, v in out.items() if v != 0})


def fock_basis(mode_count: int, photons: int) -> list[FockBasisState]:
    """All occupation vectors with the given total, in lexicographic order."""
    kets = set()
    for modes in itertools.combinations_with_replacement(range(mode_count), photons):
        occ = [0] * mode_count
        for k in modes:
            occ[k] += 1
        kets.add(tuple(occ))
    return sorted(kets)


def permanent(m: np.ndarray) -> complex:
    """Matrix permanent by Ryser's formula with Gray-code subset updates."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DomainError("permanent needs a square matrix")
    if n == 0:
        return 1.0 + 0j
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    sign = -1.0 if n % 2 else 1.0
    prev_gray = 0
    for i in range(1, 1 << n):
        gray = i ^ (i >> 1)
        flipped = (gray ^ prev_gray).bit_length() - 1
        if gray & (1 << flipped):
            row_sums += m[:, flipped]
        else:
            row_sums -= m[:, flipped]
        prev_gray = gray
        sign = -sign
        total += sign * np.prod(row_sums)
    return total


def amplitude_oracle(
    transform: ModeTransform, source: Iterable[int], target: Iterable[int]
) -> complex:
    """<target| U |source> from the permanent of a sub-matrix of U.

    Kets with different total photon numbers have zero overlap; that case
    returns 0 rather than raising.
    """
    source = tuple(source)
    target = tuple(target)
    n = transform.mode_count
    if len(source) != n or len(target) != n:
        raise DomainError("occupation vectors must match the transform's mode count")
    if sum(source) != sum(target):
        return 0j
    cols = _modes_of(source)
    rows = _modes_of(target)
    sub = transform.matrix[np.ix_(rows, cols)]
    return permanent(sub) / math.sqrt(_bosonic_factor(source) * _bosonic_factor(target))
