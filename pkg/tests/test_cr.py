import math

import numpy as np
import pytest

from zzsim.cr.models import CRCoefficients, EtaParams
from zzsim.cr.services import (
    active_cancellation,
    calibrate_zx90,
    cancellation_amplitude,
    closed_form_omega_star,
    cr_pauli_coefficients,
    crosstalk_scale,
    dynamical_eta,
    echoed_cr_rate,
    eta_terms,
    fit_pauli_slopes,
    gate_time,
    prepare_cr_frame,
    resolve_cr_model,
    segment_length,
)
from zzsim.hamiltonian.models import CouplingSpec, DeviceSpec, DriveSpec
from zzsim.shared.errors import ConfigError, DegenerateAssignmentError, InfeasibleGateLengthError
from zzsim.statics.services import static_zz_effective, static_zz_exact


@pytest.fixture
def drive() -> DriveSpec:
    return DriveSpec(control='q1', target='q2', Omega=0.03)


# ==================== Coeficientes ====================

def test_beta_convention():
    coeffs = CRCoefficients.from_betas({'ZX': 0.001, 'ZZ': 0.0002, 'IX': 0.0005})
    assert coeffs.pauli['ZX'] == pytest.approx(0.002)
    assert coeffs.pauli['ZZ'] == pytest.approx(0.0002)
    assert coeffs.beta('ZX') == pytest.approx(0.001)
    assert coeffs.betas['IX'] == pytest.approx(0.0005)
    assert coeffs.betas['ZY'] == 0.0


def test_undriven_coefficients_reduce_to_static_zz(make_bus, drive):
    device = make_bus()
    coeffs = cr_pauli_coefficients(device, drive.model_copy(update={'Omega': 0.0}))
    assert coeffs.beta('ZZ') == pytest.approx(static_zz_effective(device), abs=1e-9)
    assert abs(coeffs.beta('ZX')) < 1e-12
    assert abs(coeffs.beta('IX')) < 1e-12


def test_undriven_circuit_model_reduces_to_exact_zz(make_bus, drive):
    device = make_bus()
    circuit = drive.model_copy(update={'Omega': 0.0, 'model': 'circuit'})
    assert cr_pauli_coefficients(device, circuit).beta('ZZ') == pytest.approx(static_zz_exact(device), abs=1e-9)


def test_model_selection(make_bus, make_explicit, drive):
    assert resolve_cr_model(make_bus(), drive) == 'effective'
    assert resolve_cr_model(make_bus(), drive.model_copy(update={'model': 'circuit'})) == 'circuit'
    tunable = DeviceSpec(
        subsystems=(
            make_explicit('q1', 5.12, -0.322),
            make_explicit('c', 6.345, -0.15, role='coupler'),
            make_explicit('q2', 5.0, -0.322),
        ),
        couplings=(CouplingSpec(i='q1', j='c', g=0.12), CouplingSpec(i='q2', j='c', g=0.12)),
    )
    assert resolve_cr_model(tunable, drive) == 'circuit'


def test_effective_frame_is_two_qubit(make_bus, drive):
    frame = prepare_cr_frame(make_bus(), drive)
    assert frame.H_dressed.dims == (3, 3)
    assert frame.computational == (0, 1, 3, 4)


def test_effective_model_rejects_crosstalk_on_coupler(make_bus, drive):
    with pytest.raises(ConfigError):
        prepare_cr_frame(make_bus(), drive.model_copy(update={'crosstalk_target': 'c'}))


def test_sweep_marks_points_without_decomposition(make_bus, drive, monkeypatch):
    from zzsim.cr import services

    real = services.coefficients_in_frame

    def failing(frame, point):
        if point.Omega > 0.015:
            raise DegenerateAssignmentError('bloque singular')
        return real(frame, point)

    monkeypatch.setattr(services, 'coefficients_in_frame', failing)
    rows = services.cr_coefficient_sweep(make_bus(), drive, [0.0, 0.01, 0.02], jobs=1)
    assert [row['flagged'] for row in rows] == [False, False, True]
    assert math.isnan(rows[2]['beta_ZZ'])


def test_cross_resonance_is_linear_at_small_amplitude(make_bus, drive):
    device = make_bus()

    def zx(omega: float) -> float:
        coeffs = cr_pauli_coefficients(device, drive.model_copy(update={'Omega': omega}))
        return math.hypot(coeffs.beta('ZX'), coeffs.beta('ZY'))

    assert zx(0.002) > 0
    assert zx(0.004) / zx(0.002) == pytest.approx(2.0, rel=0.02)


def test_echoed_rate():
    coeffs = CRCoefficients.from_betas({'ZX': 0.001, 'IX': 0.0004})
    assert echoed_cr_rate(coeffs) == pytest.approx(0.002)
    assert echoed_cr_rate(coeffs, include_single=False) == pytest.approx(0.002)
    only_zz = CRCoefficients.from_betas({'ZZ': 0.0002})
    assert echoed_cr_rate(only_zz) == pytest.approx(0.0002)


def test_slope_fit_recovers_polynomials():
    omegas = np.linspace(0.0, 0.1, 11)
    rows = [{'Omega': w, 'beta_ZX': 2 * w + 3 * w ** 3, 'beta_IX': -w + 0.5 * w ** 3} for w in omegas]
    fit = fit_pauli_slopes(rows, K=0.7)
    assert (fit.B, fit.C, fit.D, fit.E) == (
        pytest.approx(2.0), pytest.approx(3.0), pytest.approx(-1.0), pytest.approx(0.5)
    )
    assert fit.K == 0.7


# ==================== η y Ω* ====================

def test_eta_series_leading_term():
    assert eta_terms(1.0, 0.5)[-1] == 2.0
    assert len(eta_terms(-1.8, 1.2)) == 7


def test_eta_flags_poles():
    near = dynamical_eta(EtaParams(delta=0.005, delta1=0.6, delta2=-0.33, J01=0.002, J10=0.003))
    far = dynamical_eta(EtaParams(delta=0.15, delta1=0.6, delta2=-0.33, J01=0.002, J10=0.003))
    assert near.flagged
    assert not far.flagged
    assert math.isfinite(far.eta)


def test_eta_requires_exchange():
    with pytest.raises(ConfigError):
        dynamical_eta(EtaParams(delta=0.1, delta1=0.6, delta2=-0.33, J01=0.0, J10=0.001))


def test_closed_form_without_solution():
    assert closed_form_omega_star(-1.0, 0.5, 0.07, -0.33) is None


def test_unknown_cancellation_method(make_bus, drive):
    with pytest.raises(ConfigError):
        cancellation_amplitude(make_bus(), drive, 'magic')


def test_cancellation_scan_skips_failed_points(make_bus, drive, monkeypatch):
    from zzsim.cr import services

    real = services.coefficients_in_frame

    def failing(frame, point):
        if 0.0105 < point.Omega < 0.0125:
            raise DegenerateAssignmentError('sin convergencia')
        return real(frame, point)

    monkeypatch.setattr(services, 'coefficients_in_frame', failing)
    report = services.cancellation_amplitude(make_bus(), drive, 'la')
    assert report.omega_star_la is None or 0 < report.omega_star_la <= services.OMEGA_STAR_MAX


def test_cancellation_scan_on_device_09(device_file):
    loaded = device_file('device_09')
    report = cancellation_amplitude(loaded.device(), loaded.drive(), 'la')
    assert report.omega_star_la == pytest.approx(0.061, rel=0.15)


# ==================== Cancelación activa y calibración ====================

def test_active_cancellation_removes_single_qubit_terms(make_bus):
    device = make_bus()
    drive = DriveSpec(control='q1', target='q2', Omega=0.03, R=0.1, phiR=0.8)
    tone = active_cancellation(device, drive)
    cancelled = cr_pauli_coefficients(device, drive.model_copy(update={'A': tone.A, 'phiA': tone.phi}))
    assert tone.residual < 1e-5
    assert abs(cancelled.beta('IX')) < 1e-5
    assert abs(cancelled.beta('IY')) < 1e-5


def test_gate_time_conventions():
    assert gate_time(100.0) == 280.0
    assert gate_time(100.0, 'gaussian') == 360.0
    assert segment_length(280.0) == 100.0
    with pytest.raises(ConfigError):
        gate_time(100.0, 'triangle')


def test_crosstalk_scale():
    assert crosstalk_scale(0.5, 1.0) == pytest.approx(0.07)
    assert crosstalk_scale(0.6, 1.0) == 0.0
    assert crosstalk_scale(0.5, 8.0) == pytest.approx(0.07 * 4)


def test_calibration_hits_target_rate(make_bus, drive):
    calibration = calibrate_zx90(make_bus(), drive, tau=400.0, omega_max=0.1, points=21, include_single=False)
    assert calibration.rate == pytest.approx(1 / 1600, rel=1e-5)
    assert calibration.gate_length == 880.0
    assert 0 < calibration.Omega < 0.1


def test_calibration_target_is_an_eighth_turn_per_segment(make_bus, drive):
    tau = 400.0
    assert echoed_cr_rate(CRCoefficients.from_betas({'ZX': 1 / (8 * tau)})) == pytest.approx(1 / (4 * tau))
    calibration = calibrate_zx90(make_bus(), drive, tau=tau, omega_max=0.1, points=21, include_single=False)
    b = cr_pauli_coefficients(make_bus(), drive.model_copy(update={'Omega': calibration.Omega})).betas
    assert math.sqrt(b['ZX'] ** 2 + b['ZY'] ** 2 + (b['ZZ'] / 2) ** 2) * tau == pytest.approx(1 / 8, rel=1e-5)


def test_calibration_infeasible(make_bus, drive):
    with pytest.raises(InfeasibleGateLengthError) as info:
        calibrate_zx90(make_bus(), drive, tau=1.0, omega_max=0.05, points=11)
    assert info.value.min_gate_length > 82.0
