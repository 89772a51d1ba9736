import math

import numpy as np
import pytest

from lopsim import DomainError
from lopsim.circuits import (
    GateParams,
    append_bell_analyzer,
    b4_matrix,
    bell_input_state,
    build_cnot,
    build_cnot_mismatch,
    logical_basis_state,
    logical_input_state,
)
from lopsim.fock import norm
from lopsim.network import beamsplitter_matrix, is_unitary
from reference import IDEAL_ROWS, general_rows, mismatch_rows, printed_ideal_matrix


def test_ideal_rows():
    transform, layout = build_cnot()
    for name, row in IDEAL_ROWS.items():
        assert np.max(np.abs(transform.row(layout.index(name)) - row)) < 1e-12


def test_ideal_vt_row_is_the_unitary_completion():
    transform, layout = build_cnot()
    expected = np.array([0, 0, 1, -1, 0, -1]) / math.sqrt(3)
    assert np.max(np.abs(transform.row(layout.index("vt_O")) - expected)) < 1e-12


def test_printed_vt_row_is_not_unitary():
    m = printed_ideal_matrix()
    assert np.max(np.abs(m.T @ m - np.eye(6))) > 0.1


@pytest.mark.parametrize("eta,etap", [(0.3, 0.45), (0.36, 0.58), (0.1, 0.9), (1.0, 0.0)])
def test_general_rows(eta, etap):
    transform, layout = build_cnot(GateParams(eta, etap))
    for name, row in general_rows(eta, etap).items():
        assert np.max(np.abs(transform.row(layout.index(name)) - row)) < 1e-12


def test_b4_is_reversed_b3():
    assert np.allclose(b4_matrix(0.5), beamsplitter_matrix(0.5))
    assert np.allclose(b4_matrix(0.2), beamsplitter_matrix(0.8))


@pytest.mark.parametrize("xi", [0.0, 0.25, 0.36, 0.8, 1.0])
def test_mismatch_rows(xi):
    transform, layout = build_cnot_mismatch(GateParams(xi=xi))
    assert transform.mode_count == 9
    for name, row in mismatch_rows(xi).items():
        assert np.max(np.abs(transform.row(layout.index(name)) - row)) < 1e-12


def test_mismatch_reduces_to_ideal_block():
    ideal, _ = build_cnot()
    full, _ = build_cnot_mismatch(GateParams(xi=1.0))
    assert np.max(np.abs(full.matrix[:6, :6] - ideal.matrix)) < 1e-12
    assert np.max(np.abs(full.matrix[:6, 6:])) < 1e-12


def test_unitary_over_grids():
    for eta in np.linspace(0, 1, 11):
        for etap in np.linspace(0, 1, 11):
            assert is_unitary(build_cnot(GateParams(eta, etap))[0])
    for xi in np.linspace(0, 1, 11):
        assert is_unitary(build_cnot_mismatch(GateParams(0.3, 0.6, xi))[0])


def test_build_cnot_refuses_mismatch():
    with pytest.raises(DomainError):
        build_cnot(GateParams(xi=0.9))


@pytest.mark.parametrize("field", ["eta", "eta_prime", "xi"])
def test_params_validated(field):
    with pytest.raises(DomainError):
        GateParams(**{field: 1.2})


def test_analyzer_ideal():
    transform, layout = append_bell_analyzer(*build_cnot())
    assert layout.outputs[:2] == ("cS1", "cS2")
    expected = (IDEAL_ROWS["cH_O"] + IDEAL_ROWS["cV_O"]) / math.sqrt(2)
    assert np.max(np.abs(transform.row(layout.index("cS1")) - expected)) < 1e-12
    assert is_unitary(transform)
    with pytest.raises(DomainError):
        append_bell_analyzer(transform, layout)


def test_analyzer_mismatch_adds_v4():
    transform, layout = append_bell_analyzer(*build_cnot_mismatch(GateParams(xi=0.5)))
    assert transform.mode_count == 10
    assert layout.modes[-1] == "v4"
    assert layout.outputs[-1] == "cS1M"
    assert "cS2M" in layout.outputs
    assert is_unitary(transform)


def test_logical_inputs():
    _, layout = build_cnot()
    assert logical_basis_state("VH", layout).terms == {(0, 1, 1, 0, 0, 0): 1}
    s = logical_input_state(1, 1, 1, 1, layout)
    assert norm(s) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        logical_input_state(0, 0, 0, 0, layout)
    with pytest.raises(DomainError):
        logical_basis_state("HX", layout)


def test_bell_inputs_follow_naming():
    _, layout = build_cnot()
    psi_minus = bell_input_state("psi-", layout)
    h = 1 / math.sqrt(2)
    assert psi_minus.terms == pytest.approx({(1, 0, 1, 0, 0, 0): h, (0, 1, 0, 1, 0, 0): -h})
    phi_plus = bell_input_state("phi+", layout)
    assert set(phi_plus.terms) == {(1, 0, 0, 1, 0, 0), (0, 1, 1, 0, 0, 0)}


def test_layout_lookup():
    _, layout = build_cnot()
    assert layout.index("tV") == layout.index("tV_O") == 3
    with pytest.raises(DomainError):
        layout.index("nope")
