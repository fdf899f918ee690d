"""
Construcción de Hamiltonianos en la base de Fock producto: términos desnudos,
acoplamientos, excitación y paso al marco rotante.
"""
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ..shared.env import get_int
from ..shared.errors import ConfigError, TruncationError
from ..shared.logger import get_logger
from ..shared.operators import annihilation, basis_labels, embed
from ..spectra.models import DuffingParams, LevelLadder
from ..spectra.services import (
    csfq_ladder,
    duffing_ladder,
    resonator_ladder,
    transmon_charge_spectrum,
    tunable_transmon_freq,
)
from .models import DeviceSpec, DriveSpec, HamiltonianMatrix, SubsystemKind, SubsystemSpec, label_for

logger = get_logger(__name__)


def subsystem_ladder(s: SubsystemSpec) -> LevelLadder:
    """
    Escalera desnuda de un subsistema truncada a `s.dim` niveles.

    Args:
        s: Especificación del subsistema

    Returns:
        Escalera de niveles con E(0) = 0

    Raises:
        ConfigError: Si una escalera explícita tiene menos niveles que `dim`
    """
    p = s.params
    if s.kind == SubsystemKind.TRANSMON:
        return transmon_charge_spectrum(p, s.dim)
    if s.kind == SubsystemKind.CSFQ:
        return csfq_ladder(p, s.dim)
    if s.kind == SubsystemKind.TUNABLE_TRANSMON:
        omega01, delta = tunable_transmon_freq(p)
        return duffing_ladder(DuffingParams(omega=omega01, delta=delta, nlevels=s.dim))
    if s.kind == SubsystemKind.RESONATOR:
        return resonator_ladder(p, s.dim)

    if p.energies is not None:
        if len(p.energies) < s.dim:
            raise ConfigError(f"subsystems.{s.id}.params.energies tiene {len(p.energies)} niveles, se requieren {s.dim}")
        return LevelLadder(energies=tuple(e - p.energies[0] for e in p.energies[:s.dim]))
    return duffing_ladder(DuffingParams(omega=p.omega, delta=p.delta, nlevels=s.dim))


def device_ladders(device: DeviceSpec) -> List[LevelLadder]:
    """Escaleras de todos los subsistemas en orden de declaración"""
    return [subsystem_ladder(s) for s in device.subsystems]


def bare_energies(device: DeviceSpec, ladders: Optional[List[LevelLadder]] = None) -> np.ndarray:
    """Suma de energías desnudas para cada estado de la base"""
    ladders = ladders or device_ladders(device)
    total = np.zeros(1)
    for ladder in ladders:
        total = np.add.outer(total, np.array(ladder.energies)).ravel()
    return total


def _check_dimension(device: DeviceSpec) -> int:
    dim = int(np.prod(device.dims))
    limit = get_int('MAX_HILBERT_DIM')
    if dim > limit:
        logger.error(f"Hilbert space dimension {dim} exceeds limit {limit}")
        raise TruncationError(f"La dimensión total {dim} excede el máximo permitido {limit}")
    return dim


def build_static(device: DeviceSpec) -> HamiltonianMatrix:
    """
    Hamiltoniano estático: escaleras desnudas más −g(a_i − a_i†)(a_j − a_j†).

    Con `device.rwa` sólo se conserva la parte co-rotante g(a_i a_j† + a_i† a_j).

    Args:
        device: Dispositivo

    Returns:
        Matriz hermítica en la base producto row-major

    Raises:
        TruncationError: Si la dimensión total excede MAX_HILBERT_DIM
    """
    _check_dimension(device)
    dims = device.dims
    H = np.diag(bare_energies(device)).astype(complex)

    for c in device.couplings:
        i, j = device.index(c.i), device.index(c.j)
        a_i = embed(annihilation(dims[i]), i, dims)
        a_j = embed(annihilation(dims[j]), j, dims)
        if device.rwa:
            H += c.g * (a_i @ a_j.conj().T + a_i.conj().T @ a_j)
        else:
            H += -c.g * (a_i - a_i.conj().T) @ (a_j - a_j.conj().T)

    logger.debug(f"Built static Hamiltonian of dimension {H.shape[0]} (rwa={device.rwa})")
    return HamiltonianMatrix(
        ids=tuple(device.ids),
        dims=tuple(dims),
        matrix=H,
        basis=tuple(basis_labels(dims)),
    )


def _quadrature(device: DeviceSpec, subsystem_id: str) -> np.ndarray:
    index = device.index(subsystem_id)
    a = embed(annihilation(device.dims[index]), index, device.dims)
    return a + a.conj().T


def resolve_target(device: DeviceSpec, drive: DriveSpec) -> str:
    """Qubit objetivo: el indicado o el otro qubit del dispositivo"""
    if drive.target is not None:
        return drive.target
    others = [q for q in device.qubit_ids() if q != drive.control]
    if len(others) != 1:
        raise ConfigError(f"no se puede deducir el qubit objetivo de '{drive.control}': {others}")
    return others[0]


def build_drive(device: DeviceSpec, drive: DriveSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Operadores de excitación en el marco de laboratorio (sin el factor coseno).

    Args:
        device: Dispositivo
        drive: Excitación

    Returns:
        (Ω·(a_c + a_c†), R·Ω·(a_t + a_t†))

    Raises:
        ConfigError: Si algún id no existe
    """
    try:
        control = drive.Omega * _quadrature(device, drive.control)
        crosstalk_id = drive.crosstalk_target or resolve_target(device, drive)
        crosstalk = drive.R * drive.Omega * _quadrature(device, crosstalk_id)
    except KeyError as e:
        raise ConfigError(f"drives: {e}") from e
    return control, crosstalk


def build_cancellation(device: DeviceSpec, drive: DriveSpec) -> np.ndarray:
    """Tono de cancelación A·(a_t + a_t†) sobre el qubit objetivo"""
    try:
        return drive.A * _quadrature(device, resolve_target(device, drive))
    except KeyError as e:
        raise ConfigError(f"drives: {e}") from e


def drive_phases(drive: DriveSpec) -> Tuple[float, float, float]:
    """Fases de los términos de control, diafonía y cancelación"""
    return drive.phi0, drive.phi0 + drive.phiR, drive.phiA


def rotating_frame_rwa(
    H_static: HamiltonianMatrix,
    drive_ops: Sequence[np.ndarray],
    drive: DriveSpec,
    omega_d: Optional[float] = None,
) -> HamiltonianMatrix:
    """
    Transforma al marco rotante W = Σ exp(−iω_d t n̂) y descarta los términos
    que siguen oscilando.

    Se conservan los elementos que conservan el número total de excitaciones;
    la diagonal se desplaza en −ω_d·N y cada operador de excitación aporta
    ½(e^{iφ}·parte de bajada + h.c.).

    Args:
        H_static: Hamiltoniano estático (en la base desnuda o vestida etiquetada)
        drive_ops: Operadores de `build_drive` y opcionalmente `build_cancellation`
        drive: Excitación (fases)
        omega_d: Frecuencia de la excitación (default: drive.omega_d)

    Returns:
        Hamiltoniano independiente del tiempo
    """
    omega_d = drive.omega_d if omega_d is None else omega_d
    if omega_d is None:
        raise ConfigError('se requiere la frecuencia de excitación omega_d')

    n_total = H_static.excitations()
    same = n_total[:, None] == n_total[None, :]
    lowering = n_total[:, None] == n_total[None, :] - 1

    H = np.where(same, H_static.matrix, 0.0) - omega_d * np.diag(n_total).astype(complex)
    for op, phase in zip(drive_ops, drive_phases(drive)):
        lower = np.where(lowering, op, 0.0) * np.exp(1j * phase)
        H = H + 0.5 * (lower + lower.conj().T)

    return H_static.with_matrix(H)


def with_parameter(device: DeviceSpec, path: str, value: Any) -> DeviceSpec:
    """
    Copia del dispositivo con un parámetro reemplazado.

    Rutas admitidas: `subsystems.<id>.params.<campo>`, `subsystems.<id>.dim`,
    `couplings.<i>-<j>.g` y `rwa`.

    Args:
        device: Dispositivo original
        path: Ruta con puntos
        value: Nuevo valor

    Returns:
        Nuevo dispositivo validado

    Raises:
        ConfigError: Si la ruta no existe o el valor es inválido
    """
    data: Dict[str, Any] = device.model_dump()
    parts = path.split('.')

    try:
        if parts[0] == 'rwa' and len(parts) == 1:
            data['rwa'] = value
        elif parts[0] == 'subsystems':
            entry = next(s for s in data['subsystems'] if s['id'] == parts[1])
            target = entry
            for key in parts[2:-1]:
                target = target[key]
            if parts[-1] not in target:
                raise KeyError(parts[-1])
            target[parts[-1]] = value
        elif parts[0] == 'couplings' and len(parts) == 3:
            a, b = parts[1].split('-', 1)
            entry = next(c for c in data['couplings'] if {c['i'], c['j']} == {a, b})
            entry[parts[2]] = value
        else:
            raise KeyError(path)
    except (StopIteration, KeyError, IndexError, ValueError, TypeError):
        raise ConfigError(f"Ruta de parámetro inexistente: {path}")

    try:
        return DeviceSpec.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Valor inválido para {path}={value}: {e}") from e


# ==================== Etiquetas ====================

def label_index(H: HamiltonianMatrix, label: Tuple[int, ...]) -> int:
    """Posición de un multi-índice en la base"""
    try:
        return H.index_of(label)
    except ValueError:
        raise ConfigError(f"etiqueta fuera de la base truncada: {label}")


def computational_labels(device: DeviceSpec, qubits: Optional[Sequence[str]] = None) -> List[Tuple[int, ...]]:
    """
    Etiquetas del subespacio computacional con los acopladores en el fundamental.

    El primer qubit es el más significativo: para dos qubits el orden es
    |00⟩, |01⟩, |10⟩, |11⟩.

    Args:
        device: Dispositivo
        qubits: Qubits en el orden deseado (default: los del dispositivo)

    Returns:
        Multi-índices en la base producto del dispositivo
    """
    qubits = list(qubits or device.qubit_ids())
    labels = []
    for bits in basis_labels([2] * len(qubits)):
        labels.append(label_for(device, dict(zip(qubits, bits))))
    return labels


def computational_indices(device: DeviceSpec, qubits: Optional[Sequence[str]] = None) -> List[int]:
    """Índices de `computational_labels` en la base producto"""
    basis = basis_labels(device.dims)
    position = {label: k for k, label in enumerate(basis)}
    return [position[label] for label in computational_labels(device, qubits)]
