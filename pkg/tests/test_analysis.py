import math

import numpy as np
import pytest

from lopsim import DomainError
from lopsim.analysis import (
    BELL_ORDER,
    BellSignatureMap,
    ErrorReport,
    bell_errors,
    bell_error_probability,
    bell_rate_table,
    error_report,
    grid,
    sweep_beamsplitter,
    sweep_mismatch,
)
from lopsim.circuits import BellKind, GateParams
from lopsim.detection import RateTable


def _closed_form(xi):
    # wrong signatures over all four signatures, from the mismatched Bell rates
    return (3 - math.sqrt(xi) - 2 * xi) / (4 - 2 * xi)


def test_ideal_gate_is_error_free():
    report = error_report(GateParams())
    assert all(abs(report.errors[k]) < 1e-12 for k in BELL_ORDER)
    assert all(report.totals[k] == pytest.approx(1 / 9) for k in BELL_ORDER)


@pytest.mark.parametrize("xi", [0.0, 0.3, 0.96, 0.99])
def test_mismatch_error_closed_form(xi):
    report = error_report(GateParams(xi=xi))
    for k in BELL_ORDER:
        assert report.errors[k] == pytest.approx(_closed_form(xi), abs=1e-12)


def test_total_mismatch_gives_three_quarters():
    assert error_report(GateParams(xi=0.0)).errors[BellKind.PHI_MINUS] == pytest.approx(0.75, abs=1e-12)


def test_xi_096_value():
    assert error_report(GateParams(xi=0.96)).errors[BellKind.PSI_PLUS] == pytest.approx(0.0481750, abs=1e-7)


def test_mismatch_network_at_xi_one_matches_ideal():
    a = bell_rate_table(GateParams(), mismatch=True)
    b = bell_rate_table(GateParams(), mismatch=False)
    assert np.max(np.abs(a.values - b.values)) < 1e-12


def test_spot_check_near_ideal():
    report = error_report(GateParams(1 / 3 + 0.01, 0.55))
    for k in BELL_ORDER:
        assert 0.004 <= report.errors[k] <= 0.010


def test_mirror_symmetry_in_eta_prime():
    for eta in (0.3, 1 / 3, 0.37):
        for d in (0.02, 0.07):
            up = error_report(GateParams(eta, 0.5 + d))
            down = error_report(GateParams(eta, 0.5 - d))
            assert up.errors[BellKind.PSI_PLUS] == pytest.approx(down.errors[BellKind.PHI_PLUS], abs=1e-12)
            assert up.errors[BellKind.PSI_MINUS] == pytest.approx(down.errors[BellKind.PHI_MINUS], abs=1e-12)


def test_error_grows_away_from_ideal():
    near = error_report(GateParams(1 / 3 + 0.01, 0.51)).errors[BellKind.PSI_PLUS]
    far = error_report(GateParams(1 / 3 + 0.04, 0.58)).errors[BellKind.PSI_PLUS]
    assert 0 < near < far


def test_mismatch_sweep_monotone():
    reports = sweep_mismatch((0.8, 1.0, 21))
    errs = [r.errors[BellKind.PSI_PLUS] for r in reports]
    assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))
    assert abs(errs[-1]) < 1e-12


def test_beamsplitter_sweep_is_eta_major():
    reports = sweep_beamsplitter((0.3, 0.35, 2), (0.45, 0.55, 3))
    assert [(r.eta, r.eta_prime) for r in reports] == [
        (0.3, 0.45), (0.3, 0.5), (0.3, 0.55), (0.35, 0.45), (0.35, 0.5), (0.35, 0.55),
    ]


def test_degenerate_row_reported():
    columns = (("cS1", "tH_O"), ("cS2", "tH_O"), ("cS1", "tV_O"), ("cS2", "tV_O"))
    values = np.eye(4) / 9
    values[2] = 0.0
    table = RateTable(tuple(k.value for k in BELL_ORDER), columns, values)
    errors, totals = bell_errors(table)
    report = ErrorReport(0.5, 0.5, 1.0, errors, totals)
    assert report.degenerate == (BellKind.PHI_PLUS,)
    assert errors[BellKind.PHI_PLUS] == 0.0


def test_full_reflection_still_has_coincidences():
    # eta = 1 bypasses the gate entirely; the analyzer then cannot tell the states apart
    report = error_report(GateParams(eta=1.0))
    assert report.degenerate == ()
    assert all(report.errors[k] == pytest.approx(0.75) for k in BELL_ORDER)


def test_error_probability_on_hand_table():
    table = RateTable(
        ("psi+",), (("cS1", "tH_O"), ("cS2", "tH_O"), ("cS1", "tV_O"), ("cS2", "tV_O")), [[0.3, 0.1, 0.0, 0.0]]
    )
    assert bell_error_probability(table, "psi+") == pytest.approx(0.25)
    with pytest.raises(DomainError):
        bell_error_probability(table, "phi+")


def test_signature_map_validation():
    with pytest.raises(DomainError):
        BellSignatureMap({BellKind.PSI_PLUS: ("cS1", "tH")})


@pytest.mark.parametrize("args", [(0.5, 0.4, 3), (0.1, 0.2, 1), (-0.1, 0.5, 3), (0.5, 1.5, 3)])
def test_grid_validation(args):
    with pytest.raises(DomainError):
        grid(*args)
