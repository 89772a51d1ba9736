import math

import numpy as np
import pytest

from lopsim import DomainError
from lopsim.network import (
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


def test_beamsplitter_flip_second():
    m = beamsplitter_matrix(1 / 3)
    r, t = math.sqrt(1 / 3), math.sqrt(2 / 3)
    assert np.allclose(m, [[r, t], [t, -r]], atol=1e-15)


def test_beamsplitter_flip_first():
    m = beamsplitter_matrix(0.25, FlipPort.FIRST)
    assert np.allclose(m, [[-0.5, math.sqrt(0.75)], [math.sqrt(0.75), 0.5]], atol=1e-15)
    assert np.allclose(beamsplitter_matrix(0.25, "first"), m)


@pytest.mark.parametrize("eta", [0.0, 0.1, 1 / 3, 0.5, 0.9, 1.0])
def test_beamsplitter_is_unitary_with_determinant_minus_one(eta):
    m = beamsplitter_matrix(eta)
    assert np.allclose(m.conj().T @ m, np.eye(2), atol=1e-15)
    assert np.isclose(np.linalg.det(m), -1)


@pytest.mark.parametrize("eta", [-0.01, 1.01, float("nan")])
def test_beamsplitter_rejects_out_of_range(eta):
    with pytest.raises(DomainError):
        beamsplitter_matrix(eta)


def test_mode_match_is_rotation():
    m = mode_match_matrix(0.64)
    assert np.allclose(m, [[0.8, 0.6], [-0.6, 0.8]], atol=1e-15)
    assert np.isclose(np.linalg.det(m), 1)
    with pytest.raises(DomainError):
        mode_match_matrix(1.5)


def test_embed_two_mode_places_block():
    block = beamsplitter_matrix(0.5)
    t = embed_two_mode(4, 3, 1, block)
    m = t.matrix
    assert m[3, 3] == block[0, 0] and m[3, 1] == block[0, 1]
    assert m[1, 3] == block[1, 0] and m[1, 1] == block[1, 1]
    assert m[0, 0] == 1 and m[2, 2] == 1
    assert is_unitary(t)


@pytest.mark.parametrize(
    "args",
    [(3, 1, 1), (3, 0, 3), (3, -1, 0)],
)
def test_embed_two_mode_rejects_bad_ports(args):
    n, i, j = args
    with pytest.raises(DomainError):
        embed_two_mode(n, i, j, np.eye(2))


def test_embed_modes_shape_check():
    with pytest.raises(DomainError):
        embed_modes(4, [0, 1, 2], np.eye(2))


def test_compose_applies_in_physical_order():
    a = embed_two_mode(3, 0, 1, beamsplitter_matrix(0.3))
    b = embed_two_mode(3, 1, 2, beamsplitter_matrix(0.7))
    assert np.allclose(compose(a, b).matrix, b.matrix @ a.matrix)
    assert not np.allclose(compose(a, b).matrix, a.matrix @ b.matrix)


def test_compose_mode_mismatch():
    with pytest.raises(DomainError):
        compose(ModeTransform.identity(2), ModeTransform.identity(3))
    with pytest.raises(DomainError):
        compose()


def test_transform_is_immutable_copy():
    raw = np.eye(2)
    t = ModeTransform(raw)
    raw[0, 0] = 5
    assert t.matrix[0, 0] == 1
    with pytest.raises(ValueError):
        t.matrix[0, 0] = 2


def test_non_square_rejected():
    with pytest.raises(DomainError):
        ModeTransform(np.zeros((2, 3)))


def test_unitarity_defect_detects_scaling():
    t = ModeTransform(1.001 * np.eye(3))
    assert unitarity_defect(t) == pytest.approx(0.001 * 2.001, rel=1e-9)
    assert not is_unitary(t)


def test_beamsplitter_spec():
    spec = BeamsplitterSpec("B1", 0, 2, 1 / 3, "second")
    assert spec.flip_port is FlipPort.SECOND
    assert is_unitary(spec.embed(3))
    with pytest.raises(DomainError):
        BeamsplitterSpec("B9", 1, 1, 0.5)
    with pytest.raises(DomainError):
        BeamsplitterSpec("B9", 0, 1, 1.5)


def test_dagger_inverts():
    t = compose(embed_two_mode(3, 0, 1, beamsplitter_matrix(0.2)), embed_two_mode(3, 2, 0, mode_match_matrix(0.5)))
    assert compose(t, t.dagger()).allclose(ModeTransform.identity(3))
