import numpy as np
import pytest

from zzsim.hamiltonian.models import CouplingSpec, DeviceSpec
from zzsim.hamiltonian.services import build_static
from zzsim.transforms.models import EffectiveTwoQubit
from zzsim.shared.errors import ConfigError, DegenerateAssignmentError, DispersiveViolationError
from zzsim.shared.operators import pauli_string
from zzsim.transforms.services import (
    check_dispersive,
    diagonalize_labeled,
    dressed_transform,
    effective_hamiltonian,
    least_action_blockdiag,
    pauli_decompose,
    reconstruct,
    sw_effective,
)


def random_hermitian(dim: int, seed: int = 7) -> np.ndarray:
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (A + A.conj().T) / 2


# ==================== Etiquetado ====================

def test_decoupled_labels_are_exact(make_bus):
    H = build_static(make_bus(g=0.0))
    spectrum = diagonalize_labeled(H)
    np.testing.assert_allclose(spectrum.energies, np.real(np.diag(H.matrix)), atol=1e-12)
    assert min(spectrum.overlaps) == pytest.approx(1.0)
    assert not spectrum.flagged


def test_weak_coupling_keeps_labels(make_bus):
    spectrum = diagonalize_labeled(build_static(make_bus(g=0.03)))
    assert spectrum.energy((0, 0, 1)) == pytest.approx(5.1, abs=0.01)
    assert spectrum.energy((1, 0, 0)) == pytest.approx(5.0, abs=0.01)
    assert spectrum.overlap((1, 0, 1)) > 0.9


def test_dressed_transform_is_unitary(make_bus):
    H = build_static(make_bus(g=0.05))
    frame = dressed_transform(H)
    np.testing.assert_allclose(frame.S.conj().T @ frame.S, np.eye(H.dim), atol=1e-10)
    np.testing.assert_allclose(frame.to_dressed(H.matrix), np.diag(frame.energies), atol=1e-9)


# ==================== Schrieffer-Wolff ====================

def test_sw_exchange_matches_resonant_splitting(make_explicit):
    g = 0.05
    device = DeviceSpec(
        subsystems=(
            make_explicit('q1', 5.0, 0.0, dim=2),
            make_explicit('q2', 5.0, 0.0, dim=2),
            make_explicit('c', 6.0, 0.0, dim=2, role='coupler'),
        ),
        couplings=(CouplingSpec(i='q1', j='c', g=g), CouplingSpec(i='q2', j='c', g=g)),
        rwa=True,
    )
    eff = sw_effective(device)
    assert eff.j(0, 0) == pytest.approx(-g ** 2 / 1.0)

    block = build_static(device).matrix[np.ix_([1, 2, 4], [1, 2, 4])]
    low, mid, _ = np.linalg.eigvalsh(block)
    assert mid - low == pytest.approx(2 * abs(eff.j(0, 0)), rel=0.02)


def test_sw_rwa_drops_counter_rotating(make_bus):
    rwa = sw_effective(make_bus(rwa=True))
    full = sw_effective(make_bus(rwa=False))
    assert abs(full.j(0, 0)) > abs(rwa.j(0, 0))
    assert rwa.max_ratio == pytest.approx(full.max_ratio)


def test_sw_rejects_strong_coupling(make_bus):
    with pytest.raises(DispersiveViolationError):
        sw_effective(make_bus(g=0.5))


def test_dispersive_ratio():
    assert check_dispersive('q-c', 0.1, 1.0) == pytest.approx(0.1)
    assert check_dispersive('q-c', 0.2, -1.0) == pytest.approx(0.2)
    with pytest.raises(DispersiveViolationError):
        check_dispersive('q-c', 0.3, 1.0)


@pytest.mark.parametrize('g, warned', [(0.095, False), (0.105, True), (0.29, True)])
def test_dispersive_warning_below_ten_g(caplog, g, warned):
    with caplog.at_level('WARNING', logger='zzsim.transforms.services'):
        check_dispersive('q-c', g, 1.0)
    assert ('Weakly dispersive' in caplog.text) == warned


def test_effective_hamiltonian_exchange():
    eff = EffectiveTwoQubit(
        omega1_bar=5.0, omega2_bar=5.1, delta1_bar=-0.3, delta2_bar=-0.3,
        J={(0, 0): 0.002, (1, 0): 0.003, (0, 1): 0.004, (1, 1): 0.005},
    )
    H = effective_hamiltonian(eff, ('q1', 'q2'))
    assert H.dims == (3, 3)
    np.testing.assert_allclose(H.matrix, H.matrix.conj().T)
    assert H.matrix[H.index_of((2, 0)), H.index_of((2, 0))].real == pytest.approx(9.7)
    assert H.matrix[H.index_of((1, 0)), H.index_of((0, 1))].real == pytest.approx(0.002)
    assert H.matrix[H.index_of((2, 0)), H.index_of((1, 1))].real == pytest.approx(np.sqrt(2) * 0.003)
    assert H.matrix[H.index_of((1, 1)), H.index_of((0, 2))].real == pytest.approx(np.sqrt(2) * 0.004)
    assert H.matrix[H.index_of((2, 1)), H.index_of((1, 2))].real == pytest.approx(2 * 0.005)
    assert H.matrix[H.index_of((1, 1)), H.index_of((1, 0))] == 0


# ==================== Mínima acción ====================

def test_blockdiag_identity_for_block_diagonal_input():
    H = np.zeros((4, 4), dtype=complex)
    H[:2, :2] = [[1.0, 0.2], [0.2, 2.0]]
    H[2:, 2:] = [[5.0, 0.1j], [-0.1j, 6.0]]
    result = least_action_blockdiag(H, [[0, 1], [2, 3]])
    np.testing.assert_allclose(result.T, np.eye(4), atol=1e-10)


def test_blockdiag_decouples_blocks():
    H = random_hermitian(6)
    H += np.diag([0, 0, 0, 20, 20, 20])
    result = least_action_blockdiag(H, [[0, 1, 2], [3, 4, 5]])
    np.testing.assert_allclose(result.T.conj().T @ result.T, np.eye(6), atol=1e-10)
    np.testing.assert_allclose(result.H_BD[:3, 3:], 0.0, atol=1e-10)
    np.testing.assert_allclose(np.linalg.eigvalsh(result.H_BD), np.linalg.eigvalsh(H), atol=1e-10)
    assert not result.flagged


def test_blockdiag_rejects_bad_partition():
    with pytest.raises(ConfigError):
        least_action_blockdiag(np.eye(4), [[0, 1], [1, 2, 3]])


def test_blockdiag_rejects_non_finite_input():
    H = random_hermitian(4)
    H[0, 3] = H[3, 0] = np.nan
    with pytest.raises(DegenerateAssignmentError):
        least_action_blockdiag(H, [[0, 1], [2, 3]])


def test_blockdiag_converts_lapack_failures(monkeypatch):
    from zzsim.transforms import services

    def diverging(sub, side='left'):
        raise np.linalg.LinAlgError('SVD did not converge')

    monkeypatch.setattr(services, 'polar', diverging)
    with pytest.raises(DegenerateAssignmentError):
        least_action_blockdiag(random_hermitian(4) + np.diag([0, 0, 30, 30]), [[0, 1], [2, 3]])


# ==================== Pauli ====================

def test_pauli_weight_convention():
    coeffs = pauli_decompose(0.3 * pauli_string('ZZ') / 4 + 0.2 * pauli_string('ZX') / 4 + 0.1 * pauli_string('IX') / 2)
    assert coeffs['ZZ'] == pytest.approx(0.3)
    assert coeffs['ZX'] == pytest.approx(0.2)
    assert coeffs['IX'] == pytest.approx(0.1)
    assert coeffs['XI'] == pytest.approx(0.0)


@pytest.mark.parametrize('dim', [4, 8])
def test_pauli_reconstruction(dim):
    H = random_hermitian(dim)
    np.testing.assert_allclose(reconstruct(pauli_decompose(H)), H, atol=1e-12)


def test_pauli_rejects_other_sizes():
    with pytest.raises(ConfigError):
        pauli_decompose(np.eye(3))
