import numpy as np
import pytest

from zzsim.hamiltonian.models import CouplingSpec, DeviceSpec, DriveSpec, SubsystemSpec
from zzsim.hamiltonian.services import (
    bare_energies,
    build_drive,
    build_static,
    computational_labels,
    rotating_frame_rwa,
    with_parameter,
)
from zzsim.shared.errors import ConfigError, NumericalDomainError, TruncationError
from zzsim.shared.operators import embed, number


def total_number(H) -> np.ndarray:
    return sum(embed(number(d), k, H.dims) for k, d in enumerate(H.dims))


def test_decoupled_eigenvalues_are_bare_sums(make_bus):
    device = make_bus(g=0.0)
    H = build_static(device)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(H.matrix)), np.sort(bare_energies(device)), atol=1e-12)
    assert np.count_nonzero(H.matrix - np.diag(np.diag(H.matrix))) == 0


def test_exchange_splitting_two_levels(make_explicit):
    device = DeviceSpec(
        subsystems=(make_explicit('a', 5.0, 0.0, dim=2), make_explicit('b', 5.0, 0.0, dim=2)),
        couplings=(CouplingSpec(i='a', j='b', g=0.02),),
        rwa=True,
    )
    evals = np.linalg.eigvalsh(build_static(device).matrix)
    np.testing.assert_allclose(evals, [0.0, 4.98, 5.02, 10.0], atol=1e-12)


@pytest.mark.parametrize('rwa', [True, False])
def test_static_is_hermitian(make_bus, rwa):
    H = build_static(make_bus(rwa=rwa, g12=0.003)).matrix
    assert np.abs(H - H.conj().T).max() < 1e-12 * np.abs(H).max()


def test_rwa_conserves_excitations(make_bus):
    H = build_static(make_bus(rwa=True))
    N = total_number(H)
    assert np.abs(H.matrix @ N - N @ H.matrix).max() < 1e-12
    H_full = build_static(make_bus(rwa=False))
    assert np.abs(H_full.matrix @ N - N @ H_full.matrix).max() > 1e-3


def test_permutation_invariance(make_bus, make_explicit):
    device = make_bus(g12=0.004)
    reordered = DeviceSpec(subsystems=tuple(reversed(device.subsystems)), couplings=device.couplings)
    first = np.linalg.eigvalsh(build_static(device).matrix)
    second = np.linalg.eigvalsh(build_static(reordered).matrix)
    np.testing.assert_allclose(first, second, atol=1e-10)


def test_dimension_guard(make_explicit):
    device = DeviceSpec(subsystems=tuple(make_explicit(f"q{k}", 5.0, -0.3, dim=20) for k in range(4)))
    with pytest.raises(TruncationError) as info:
        build_static(device)
    assert isinstance(info.value, NumericalDomainError)
    assert info.value.exit_code == 2


def test_rejects_unknown_coupling_reference(make_explicit):
    with pytest.raises(ValueError):
        DeviceSpec(
            subsystems=(make_explicit('a', 5.0, -0.3),),
            couplings=(CouplingSpec(i='a', j='z', g=0.01),),
        )


# ==================== Excitación ====================

def test_drive_ladder_factors(make_explicit):
    device = DeviceSpec(subsystems=(make_explicit('c', 5.0, -0.3, dim=3), make_explicit('t', 5.1, -0.3, dim=3)))
    control, crosstalk = build_drive(device, DriveSpec(control='t', target='c', Omega=0.05))
    # t es el último subsistema: sus pasos de escalera aparecen en bloques de 3
    assert control[0, 1] == pytest.approx(0.05)
    assert control[1, 2] == pytest.approx(0.05 * np.sqrt(2))
    assert np.abs(crosstalk).max() == 0.0


def test_zero_amplitude_drive(make_bus):
    control, crosstalk = build_drive(make_bus(), DriveSpec(control='q1', Omega=0.0, R=0.3))
    assert np.abs(control).max() == 0.0
    assert np.abs(crosstalk).max() == 0.0


def test_rabi_splitting(make_explicit):
    device = DeviceSpec(subsystems=(make_explicit('q', 5.0, -0.3, dim=2),))
    drive = DriveSpec(control='q', target='q', omega_d=5.0, Omega=0.04)
    H = rotating_frame_rwa(build_static(device), build_drive(device, drive), drive)
    np.testing.assert_allclose(np.linalg.eigvalsh(H.matrix), [-0.02, 0.02], atol=1e-12)


def test_frame_shift_only(make_explicit):
    device = DeviceSpec(subsystems=(make_explicit('q', 5.0, -0.3, dim=4),))
    drive = DriveSpec(control='q', target='q', omega_d=5.0)
    H = rotating_frame_rwa(build_static(device), build_drive(device, drive), drive)
    np.testing.assert_allclose(np.diag(H.matrix).real, [0.0, 0.0, -0.3, -0.9], atol=1e-12)


def test_rotating_frame_conserves_excitations(make_bus):
    device = make_bus(rwa=False)
    drive = DriveSpec(control='q1', target='q2', omega_d=5.1, Omega=0.03, R=0.1, phiR=0.7)
    H = rotating_frame_rwa(build_static(device), build_drive(device, drive), drive)
    assert np.abs(H.matrix - H.matrix.conj().T).max() < 1e-12
    # Sin excitación el resultado conmuta con N; con excitación sólo acopla N y N±1
    static = rotating_frame_rwa(build_static(device), [], drive)
    N = total_number(static)
    assert np.abs(static.matrix @ N - N @ static.matrix).max() < 1e-12


# ==================== Parámetros y etiquetas ====================

def test_with_parameter_paths(make_bus):
    device = make_bus()
    moved = with_parameter(device, 'subsystems.q2.params.omega', 5.2)
    assert moved.subsystem('q2').params.omega == 5.2
    assert with_parameter(device, 'couplings.c-q1.g', 0.07).coupling('q1', 'c') == 0.07
    assert with_parameter(device, 'rwa', True).rwa


def test_with_parameter_unknown_path(make_bus):
    with pytest.raises(ConfigError):
        with_parameter(make_bus(), 'subsystems.q9.params.omega', 5.0)


def test_computational_labels_skip_coupler(make_bus):
    assert computational_labels(make_bus()) == [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1)]
