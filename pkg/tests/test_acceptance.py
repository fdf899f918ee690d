import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from zzsim.channels.services import (
    cz_minimum_gap,
    cz_phase_gate_length,
    gate_error_flux_scan,
    gate_error_length_scan,
)
from zzsim.cr.services import cancellation_amplitude, cr_pauli_coefficients
from zzsim.hamiltonian.services import build_static, with_parameter
from zzsim.statics.services import find_zero, static_zz_exact
from zzsim.three_qubit.models import Method
from zzsim.three_qubit.services import three_q_pauli
from zzsim.transforms.services import diagonalize_labeled

pytestmark = pytest.mark.acceptance


# ==================== ZZ estático ====================

def test_table_freq_zero_crossings(device_file):
    device = device_file('table_freq').device()
    roots = find_zero(device, 'subsystems.csfq.params.f', static_zz_exact, (0.48, 0.52))
    assert len(roots) == 2
    assert roots[0] == pytest.approx(0.496, abs=0.003)
    assert roots[1] == pytest.approx(0.504, abs=0.003)


def test_table_freq_sweet_spot_zz(device_file):
    assert static_zz_exact(device_file('table_freq').device()) == pytest.approx(140e-6, rel=0.3)


def test_pf_gate_off_point(device_file):
    device = device_file('pf_gate_off').device()
    roots = find_zero(device, 'subsystems.c.params.omega', static_zz_exact, (6.1, 6.6))
    assert any(abs(root - 6.345) < 0.03 for root in roots)


def test_table_freq_resonant_splitting(device_file):
    device = device_file('table_freq').device()

    def splitting(f: float) -> float:
        spectrum = diagonalize_labeled(build_static(with_parameter(device, 'subsystems.csfq.params.f', float(f))))
        return abs(spectrum.energy((1, 0, 0)) - spectrum.energy((0, 1, 0)))

    grid = np.linspace(0.30, 0.50, 81)
    k = int(np.argmin([splitting(f) for f in grid]))
    best = minimize_scalar(splitting, bounds=(grid[max(k - 1, 0)], grid[min(k + 1, 80)]),
                           method='bounded', options={'xatol': 1e-7})
    assert best.fun == pytest.approx(0.0126, rel=0.05)


# ==================== Cancelación dinámica ====================

@pytest.mark.parametrize('name, expected', [
    ('device_01', 0.042),
    ('device_02', 0.030),
    ('device_03', 0.024),
    ('device_08', 0.115),
    ('device_09', 0.061),
    ('device_10', 0.082),
])
def test_cancellation_amplitude_table(device_file, name, expected):
    loaded = device_file(name)
    report = cancellation_amplitude(loaded.device(), loaded.drive(), 'la')
    assert report.omega_star_la == pytest.approx(expected, rel=0.15)


@pytest.mark.parametrize('name', ['device_04', 'device_05', 'device_06', 'device_07'])
def test_no_dynamical_cancellation(device_file, name):
    loaded = device_file(name)
    assert cancellation_amplitude(loaded.device(), loaded.drive(), 'la').omega_star_la is None


def test_pf_gate_on_cancellation(device_file):
    loaded = device_file('pf_gate_on')
    report = cancellation_amplitude(loaded.device(), loaded.drive(), 'la')
    assert report.omega_star_la == pytest.approx(0.075, rel=0.15)


def test_pf_gate_on_zx_rate(device_file):
    loaded = device_file('pf_gate_on')
    device, drive = loaded.device(), loaded.drive()
    omega_star = cancellation_amplitude(device, drive, 'la').omega_star_la
    coeffs = cr_pauli_coefficients(device, drive.model_copy(update={'Omega': omega_star}))
    assert abs(coeffs.beta('ZX')) == pytest.approx(0.0075, rel=0.2)


# ==================== Error de gate ====================

@pytest.mark.parametrize('name, expected', [('device_02', 172.0), ('device_08', 152.0)])
def test_gate_length_minimum(device_file, name, expected):
    loaded = device_file(name)
    device, drive = loaded.device(), loaded.drive()

    def error(gate_length: float) -> float:
        value = gate_error_length_scan(device, drive, [float(gate_length)], jobs=1)[0]['error']
        return value if np.isfinite(value) else 1.0

    grid = np.arange(120.0, 262.0, 4.0)
    k = int(np.argmin([error(t) for t in grid]))
    best = minimize_scalar(error, bounds=(grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]),
                           method='bounded', options={'xatol': 0.05})
    assert best.x == pytest.approx(expected, rel=0.1)
    assert best.fun < 1e-4


def test_table_freq_w_shaped_error(device_file):
    loaded = device_file('table_freq')
    device, drive = loaded.device(), loaded.drive()
    fluxes = np.round(np.linspace(0.49, 0.51, 41), 6)
    rows = gate_error_flux_scan(
        device,
        drive,
        560.0,
        fluxes,
        coherence=loaded.coherence_pair('csfq', 'tr'),
        dephasing=loaded.noise.dephasing,
        crosstalk=True,
    )
    errors = np.array([row['error'] for row in rows])
    left = int(np.argmin(errors[:20]))
    right = 21 + int(np.argmin(errors[21:]))
    assert fluxes[left] == pytest.approx(0.496, abs=0.002)
    assert fluxes[right] == pytest.approx(0.504, abs=0.002)
    assert errors[20] > max(errors[left], errors[right])
    assert errors[0] > errors[left] and errors[-1] > errors[right]


# ==================== CZ ====================

def test_cz_gate_length(device_file):
    cz = device_file('cz').cz
    assert cz_phase_gate_length(cz.f_off, cz.f_on, cz.x, cz.phase) == pytest.approx(419.0, rel=0.05)


def test_cz_minimum_gap(device_file):
    result = cz_minimum_gap(device_file('cz').device(), 'q1')
    # el punto fijo de un paso da ~9 MHz; la diagonalización exacta, ~32 MHz
    assert result['omega1'] == pytest.approx(5.71, abs=0.01)
    assert result['gap'] == pytest.approx(0.0093, rel=0.1)


# ==================== Tres qubits ====================

def test_three_body_term_device_1(device_file):
    alphas = three_q_pauli(device_file('three_qubit_1').three_qubit, Method.NRWA_SW).alphas
    assert alphas['ZZZ'] == pytest.approx(100e-6, rel=0.4)
    for label in ('ZZI', 'ZIZ', 'IZZ'):
        assert abs(alphas[label]) >= 2 * abs(alphas['ZZZ'])


def test_three_body_sign_flip_device_2(device_file):
    first = three_q_pauli(device_file('three_qubit_1').three_qubit, Method.NRWA_SW).alpha('ZZZ')
    second = three_q_pauli(device_file('three_qubit_2').three_qubit, Method.NRWA_SW).alpha('ZZZ')
    assert first * second < 0


def test_chain_without_outer_coupling(device_file):
    dev = device_file('three_qubit_3').three_qubit
    for method in (Method.RWA_PT, Method.NRWA_PT):
        result = three_q_pauli(dev, method)
        assert result.alpha('ZIZ') == pytest.approx(0.0, abs=1e-12)
        assert result.alpha('ZZZ') == pytest.approx(0.0, abs=1e-12)


def test_chain_with_direct_coupling(device_file):
    alphas = three_q_pauli(device_file('three_qubit_4').three_qubit, Method.NRWA_SW).alphas
    assert alphas['ZIZ'] == pytest.approx(60e-6, rel=0.4)
    assert alphas['ZZZ'] == pytest.approx(-50e-6, rel=0.4)
