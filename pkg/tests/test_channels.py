import math

import numpy as np
import pytest

from zzsim.channels.models import CoherenceTimes, DephasingModel, QuantumChannel
from zzsim.channels.services import (
    average_gate_fidelity,
    coherence_limited_error,
    compose,
    csfq_t2,
    cz_minimum_gap,
    cz_phase_gate_length,
    decoherence_channel,
    degenerate_gap,
    echoed_cr_error,
    f_of_omega1,
    flux_dephasing_rate,
    identity_channel,
    ideal_cancellation,
    omega1_of_f,
    ptm_of_unitary,
    square_flux_pulse,
    tanh_flux_pulse,
    unitary_channel,
    zx90_unitary,
    zz_of_omega1,
)
from zzsim.cr.models import CRCoefficients
from zzsim.hamiltonian.models import CouplingSpec, DeviceSpec
from zzsim.hamiltonian.services import build_static
from zzsim.shared.errors import ConfigError, DomainError, RejectedPathError
from zzsim.shared.operators import pauli_string


# ==================== Matrices de transferencia ====================

def test_identity_unitary_gives_identity_ptm():
    np.testing.assert_allclose(ptm_of_unitary(np.eye(4)).ptm, np.eye(16), atol=1e-12)


def test_unitary_channel_is_trace_preserving():
    channel = unitary_channel(0.003 * pauli_string('ZX') / 2 + 0.001 * pauli_string('IX') / 2, 120.0)
    assert channel.is_trace_preserving()
    np.testing.assert_allclose(channel.ptm @ channel.ptm.T, np.eye(16), atol=1e-10)


def test_rejects_non_unitary():
    with pytest.raises(ConfigError):
        ptm_of_unitary(np.diag([1.0, 0.5]))


def test_composition_order():
    half = ptm_of_unitary(zx90_unitary())
    full = compose(half, half)
    np.testing.assert_allclose(full.ptm, ptm_of_unitary(zx90_unitary() @ zx90_unitary()).ptm, atol=1e-12)


def test_channel_shape_validation():
    with pytest.raises(ValueError):
        QuantumChannel(ptm=np.eye(8))


# ==================== Decoherencia ====================

def test_decoherence_factors():
    channel = decoherence_channel(CoherenceTimes(T1=18.0, T2=15.0), 200.0)
    assert channel.ptm[1, 1] == pytest.approx(math.exp(-0.2 / 15.0))
    assert channel.ptm[2, 2] == pytest.approx(math.exp(-0.2 / 15.0))
    assert channel.ptm[3, 3] == pytest.approx(math.exp(-0.2 / 18.0))
    assert channel.is_trace_preserving()


def test_infinite_coherence_is_identity():
    channel = decoherence_channel(CoherenceTimes(), 500.0)
    np.testing.assert_allclose(channel.ptm, np.eye(4))


def test_t2_bound():
    with pytest.raises(ValueError):
        CoherenceTimes(T1=10.0, T2=25.0)


def test_coherence_error_grows_with_length():
    pair = (CoherenceTimes(T1=18.0, T2=15.0), CoherenceTimes(T1=40.0, T2=45.0))
    short = coherence_limited_error(pair, 200.0).error
    long = coherence_limited_error(pair, 400.0).error
    assert 0 < short < long


# ==================== CR eco ====================

def test_perfect_echo_has_no_error():
    tau = 200.0
    plus = CRCoefficients.from_betas({'ZX': 1 / (8 * tau)})
    minus = CRCoefficients.from_betas({'ZX': -1 / (8 * tau)})
    result = echoed_cr_error(plus, minus, tau, 480.0)
    assert result.error == pytest.approx(0.0, abs=1e-12)
    assert average_gate_fidelity(identity_channel(2), identity_channel(2)) == pytest.approx(1.0)


def test_static_zz_error():
    tau, gate_length, zeta = 200.0, 480.0, 1e-4
    plus = CRCoefficients.from_betas({'ZX': 1 / (8 * tau), 'ZZ': zeta})
    minus = CRCoefficients.from_betas({'ZX': -1 / (8 * tau), 'ZZ': zeta})
    theta = 2 * math.pi * zeta * gate_length / 4
    expected = 1 - (4 * math.cos(theta) ** 2 + 1) / 5
    assert echoed_cr_error(plus, minus, tau, gate_length).error == pytest.approx(expected, rel=1e-9)


def test_echo_cancels_single_qubit_terms():
    tau = 200.0
    plus = CRCoefficients.from_betas({'ZX': 1 / (8 * tau), 'IX': 2e-4, 'ZI': 3e-4})
    minus = CRCoefficients.from_betas({'ZX': -1 / (8 * tau), 'IX': -2e-4, 'ZI': 3e-4})
    clean = ideal_cancellation(plus)
    assert clean.beta('IX') == 0.0 and clean.beta('ZX') == pytest.approx(1 / (8 * tau))
    # IX y ZI cambian de signo entre segmentos y conmutan con ZX
    assert echoed_cr_error(plus, minus, tau, 480.0).error == pytest.approx(0.0, abs=1e-10)


# ==================== Desfase ====================

def test_linear_dephasing():
    assert flux_dephasing_rate(0.0) == pytest.approx(0.039)
    assert flux_dephasing_rate(10.0, DephasingModel(slope=0.02, offset=0.0)) == pytest.approx(0.2)


def test_sqrt_log_domain():
    with pytest.raises(DomainError):
        flux_dephasing_rate(1.0, form='sqrt-log', t=1e6)
    assert flux_dephasing_rate(1.0, form='sqrt-log', t=10.0) > 0


def test_csfq_t2():
    assert csfq_t2(20.0, 0.0) == pytest.approx(40.0)
    assert csfq_t2(20.0, 0.05) == pytest.approx(1 / (0.025 + 0.05))


# ==================== CZ ====================

def test_flux_fit_inverse():
    assert f_of_omega1(omega1_of_f(0.3)) == pytest.approx(0.3, abs=1e-9)
    with pytest.raises(DomainError):
        f_of_omega1(7.0)


def test_cz_fit_values():
    assert omega1_of_f(0.214) == pytest.approx(6.257, abs=1e-3)
    assert zz_of_omega1(6.257) == pytest.approx(0.0, abs=5e-5)


def test_tanh_pulse_shape():
    assert tanh_flux_pulse(0.0, 100.0, 0.2, 0.3, 5.0) == pytest.approx(0.2)
    assert tanh_flux_pulse(50.0, 100.0, 0.2, 0.3, 5.0) == pytest.approx(tanh_flux_pulse(350.0, 100.0, 0.2, 0.3, 5.0))


def test_constant_zz_gate_length():
    t_g = cz_phase_gate_length(0.2, 0.3, 5.0, omega_of_f=lambda f: 6.0, zz_of_omega=lambda w: 0.002, pole=None)
    assert t_g == pytest.approx(250.0, abs=0.2)


def test_path_below_pole_is_rejected():
    with pytest.raises(RejectedPathError):
        cz_phase_gate_length(0.0, 0.3, 5.0, omega_of_f=lambda f: 5.6 + f)


def test_degenerate_gap_is_twice_the_exchange(make_explicit):
    device = DeviceSpec(
        subsystems=(make_explicit('a', 5.0, -0.3, dim=2), make_explicit('b', 5.0, -0.3, dim=2)),
        couplings=(CouplingSpec(i='a', j='b', g=0.01),),
        rwa=True,
    )
    result = degenerate_gap(build_static(device), ((1, 0), (0, 1)))
    assert result.gap == pytest.approx(0.02)
    assert result.coupling == pytest.approx(0.01)


def test_square_pulse_holds_the_operating_flux():
    np.testing.assert_allclose(square_flux_pulse(np.array([0.0, 120.0, 250.0]), 250.0, 0.2, 0.3), 0.3)


def test_square_pulse_constant_zz_gate_length():
    t_g = cz_phase_gate_length(0.2, 0.3, 0.0, omega_of_f=lambda f: 6.0, zz_of_omega=lambda w: 0.002,
                               pole=None, shape='square')
    assert t_g == pytest.approx(250.0, abs=0.2)


def test_unknown_pulse_shape():
    with pytest.raises(ConfigError):
        cz_phase_gate_length(0.2, 0.3, 5.0, shape='gauss')


def test_minimum_gap_needs_a_tunable_pair(device_file):
    with pytest.raises(ConfigError):
        cz_minimum_gap(device_file('cz').device(), 'q1', pair=((0, 1, 0), (0, 0, 1)))


def test_minimum_gap_finds_the_exchange_splitting(make_explicit):
    device = DeviceSpec(
        subsystems=(make_explicit('a', 5.05, -0.3, dim=2), make_explicit('b', 5.0, -0.3, dim=2)),
        couplings=(CouplingSpec(i='a', j='b', g=0.01),),
        rwa=True,
    )
    result = cz_minimum_gap(device, 'a', pair=((1, 0), (0, 1)), half_width=0.05)
    assert result['omega1'] == pytest.approx(5.0, abs=1e-3)
    assert result['gap'] == pytest.approx(0.02, rel=1e-3)
