"""Beamsplitter matrices, two-mode embedding and composition of mode transforms.

Orientation: row ``j`` of a transform expresses output operator ``j`` as a
combination of input operators (``out = U @ in``).  Applying ``first`` and
then ``then`` therefore gives ``then.matrix @ first.matrix``; ``compose``
takes its arguments in physical order and does that multiplication for you.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

UNITARY_TOL = 1e-12


class FlipPort(str, Enum):
    """Port whose reflected amplitude picks up the minus sign."""

    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True, eq=False)
class ModeTransform:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"mode transform must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def mode_count(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, mode_count: int) -> ModeTransform:
        return cls(np.eye(mode_count))

    def dagger(self) -> ModeTransform:
        return ModeTransform(self.matrix.conj().T)

    def row(self, index: int) -> np.ndarray:
        return self.matrix[index]

    def allclose(self, other: ModeTransform, atol: float = UNITARY_TOL) -> bool:
        return self.mode_count == other.mode_count and bool(
            np.max(np.abs(self.matrix - other.matrix)) <= atol
        )


@dataclass(frozen=True)
class BeamsplitterSpec:
    name: str
    port_a: int
    port_b: int
    reflectivity: float
    flip_port: FlipPort = FlipPort.SECOND

    def __post_init__(self):
        if self.port_a == self.port_b:
            raise DomainError(f"{self.name}: ports must differ, both are {self.port_a}")
        _check_unit_interval(self.reflectivity, f"{self.name} reflectivity")
        object.__setattr__(self, "flip_port", FlipPort(self.flip_port))

    def embed(self, mode_count: int) -> ModeTransform:
        return embed_two_mode(
            mode_count,
            self.port_a,
            self.port_b,
            beamsplitter_matrix(self.reflectivity, self.flip_port),
        )


def _check_unit_interval(value: float, what: str) -> None:
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{what} must lie in [0, 1], got {value!r}")


def beamsplitter_matrix(eta: float, flip_port: FlipPort | str = FlipPort.SECOND) -> np.ndarray:
    """Phase-asymmetric beamsplitter of reflectivity ``eta``.

    With the default flip on the second port::

        a_out = sqrt(eta) a_in + sqrt(1 - eta) b_in
        b_out = sqrt(1 - eta) a_in - sqrt(eta) b_in
    """
    _check_unit_interval(eta, "reflectivity")
    r = math.sqrt(eta)
    t = math.sqrt(1.0 - eta)
    m = np.array([[r, t], [t, r]], dtype=complex)
    if FlipPort(flip_port) is FlipPort.FIRST:
        m[0, 0] = -r
    else:
        m[1, 1] = -r
    return m


def mode_match_matrix(xi: float) -> np.ndarray:
    """Rotation splitting a mode into matched and mismatched components.

    Maps ``(c, v)`` to ``(sqrt(xi) c + sqrt(1-xi) v, -sqrt(1-xi) c + sqrt(xi) v)``.
    Unlike a beamsplitter this has determinant +1.
    """
    _check_unit_interval(xi, "mode-match parameter")
    s = math.sqrt(xi)
    c = math.sqrt(1.0 - xi)
    return np.array([[s, c], [-c, s]], dtype=complex)


def embed_modes(mode_count: int, indices: list[int] | tuple[int, ...], block: np.ndarray) -> ModeTransform:
    """Identity on every mode except ``indices``, which carry ``block``."""
    indices = list(indices)
    block = np.asarray(block, dtype=complex)
    k = len(indices)
    if block.shape != (k, k):
        raise DomainError(f"block shape {block.shape} does not match {k} indices")
    if len(set(indices)) != k:
        raise DomainError(f"repeated mode index in {indices}")
    for i in indices:
        if not 0 <= i < mode_count:
            raise DomainError(f"mode index {i} out of range for {mode_count} modes")
    m = np.eye(mode_count, dtype=complex)
    for r, i in enumerate(indices):
        m[i, indices] = block[r]
    return ModeTransform(m)


def embed_two_mode(mode_count: int, i: int, j: int, m: np.ndarray) -> ModeTransform:
    if i == j:
        raise DomainError(f"two-mode element needs distinct ports, got {i} twice")
    return embed_modes(mode_count, (i, j), m)


def compose(*transforms: ModeTransform) -> ModeTransform:
    """Single transform equivalent to the arguments applied left to right."""
    if not transforms:
        raise DomainError("compose needs at least one transform")
    n = transforms[0].mode_count
    result = np.eye(n, dtype=complex)
    for t in transforms:
        if t.mode_count != n:
            raise DomainError(f"mode count mismatch in compose: {t.mode_count} vs {n}")
        result = t.matrix @ result
    return ModeTransform(result)


def unitarity_defect(transform: ModeTransform) -> float:
    """Max-abs entry of U^dagger U - I."""
    m = transform.matrix
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(transform: ModeTransform, tol: float = UNITARY_TOL) -> bool:
    return unitarity_defect(transform) <= tol
