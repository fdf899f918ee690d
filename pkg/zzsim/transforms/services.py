"""
Diagonalización con etiquetado de estados vestidos, parámetros efectivos de
Schrieffer-Wolff y diagonalización por bloques de mínima acción.
"""
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh, polar

from ..hamiltonian.models import DeviceSpec, HamiltonianMatrix
from ..hamiltonian.services import subsystem_ladder
from ..shared.errors import ConfigError, DegenerateAssignmentError, DispersiveViolationError
from ..shared.logger import get_logger
from ..shared.operators import basis_labels, pauli_basis, pauli_weight
from .models import BlockDecomposition, DressedFrame, DressedSpectrum, EffectiveTwoQubit, Label, PauliCoefficients

logger = get_logger(__name__)

TIE_TOLERANCE = 1e-6
DISPERSIVE_WARN = 0.1
DISPERSIVE_LIMIT = 0.3
EFFECTIVE_LEVELS = 3


# ==================== Etiquetado ====================

def _gauge_fix(vectors: np.ndarray) -> np.ndarray:
    """Fija la fase de cada columna: su componente de mayor módulo es real positiva"""
    pivots = np.abs(vectors).argmax(axis=0)
    phases = vectors[pivots, np.arange(vectors.shape[1])]
    return vectors * (np.abs(phases) / phases)[None, :]


def _assign_labels(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[int]]:
    """
    Asigna a cada autovector el estado desnudo de mayor solapamiento.

    Returns:
        (autovalores, autovectores, índice del autovector de cada estado desnudo,
        índices desnudos con asignación ambigua)
    """
    values, vectors = eigh(matrix)
    weights = np.abs(vectors) ** 2
    bare = np.real(np.diag(matrix))

    eig_of_bare = np.full(len(values), -1)
    taken = np.zeros(len(values), dtype=bool)
    ambiguous = []

    for k in np.argsort(-weights.max(axis=0), kind='stable'):
        column = np.where(taken, -1.0, weights[:, k])
        best = column.max()
        candidates = np.flatnonzero(column >= best - TIE_TOLERANCE)
        if len(candidates) > 1:
            chosen = candidates[np.argmin(bare[candidates])]
            ambiguous.append(int(chosen))
        else:
            chosen = candidates[0]
        eig_of_bare[chosen] = k
        taken[chosen] = True

    return values, vectors, eig_of_bare, ambiguous


def diagonalize_labeled(H: HamiltonianMatrix) -> DressedSpectrum:
    """
    Diagonaliza H y etiqueta cada energía vestida con un estado desnudo.

    La asignación es biyectiva: se recorre los autovectores por solapamiento
    máximo decreciente y cada uno toma el mejor estado desnudo libre. Los empates
    dentro de 1e-6 se resuelven hacia el estado de menor energía desnuda y se
    marcan como ambiguos.

    Args:
        H: Hamiltoniano en la base producto

    Returns:
        Espectro vestido etiquetado
    """
    values, vectors, eig_of_bare, ambiguous = _assign_labels(H.matrix)
    overlaps = np.abs(vectors[np.arange(H.dim), eig_of_bare])

    spectrum = DressedSpectrum(
        ids=H.ids,
        labels=H.basis,
        energies=tuple(float(values[k]) for k in eig_of_bare),
        overlaps=tuple(float(o) for o in overlaps),
        ambiguous=tuple(H.basis[i] for i in ambiguous),
    )
    if spectrum.ambiguous:
        logger.warning(f"Ambiguous dressed labels: {list(spectrum.ambiguous)[:5]}")
    weak = spectrum.weak_labels()
    if weak:
        logger.warning(f"Dressed states with overlap below 1/sqrt(2): {weak[:5]}")
    return spectrum


def dressed_energy(spectrum: DressedSpectrum, label: Label) -> float:
    """Energía vestida del estado etiquetado `label`"""
    return spectrum.energy(label)


def dressed_transform(H: HamiltonianMatrix) -> DressedFrame:
    """
    Autovectores ordenados por etiqueta y con fase fijada.

    Args:
        H: Hamiltoniano en la base producto

    Returns:
        Energías y matriz S en el orden de la base desnuda
    """
    values, vectors, eig_of_bare, _ = _assign_labels(H.matrix)
    S = _gauge_fix(vectors[:, eig_of_bare])
    return DressedFrame(energies=values[eig_of_bare], S=S)


# ==================== Schrieffer-Wolff ====================

def dressed_levels(energies: Sequence[float], couplers: List[Tuple[float, float]], nrwa: bool) -> np.ndarray:
    """Ē(n) para n = 0, 1, 2 con los desplazamientos dispersivos de cada acoplador"""
    omega = np.diff(energies)
    levels = np.array(energies[:3], dtype=float)
    for omega_c, g in couplers:
        for n in range(3):
            if n > 0:
                levels[n] -= n * g ** 2 / (omega_c - omega[n - 1])
            if nrwa:
                levels[n] -= (n + 1) * g ** 2 / (omega_c + omega[n])
    return levels


def check_dispersive(name: str, g: float, detuning: float) -> float:
    """
    |g/Δ| de un par qubit-acoplador.

    Por encima de 0.1 (|Δ| < 10g) se advierte que la eliminación perturbativa
    pierde precisión; desde 0.3 el par deja de ser dispersivo.

    Raises:
        DispersiveViolationError: Si |g/Δ| ≥ 0.3
    """
    ratio = abs(g / detuning) if detuning != 0 else np.inf
    if ratio >= DISPERSIVE_LIMIT:
        logger.error(f"Dispersive regime violated for {name}: |g/Delta| = {ratio:.3f}")
        raise DispersiveViolationError(f"{name}: |g/Δ| = {ratio:.3f} ≥ {DISPERSIVE_LIMIT}")
    if ratio > DISPERSIVE_WARN:
        logger.warning(f"Weakly dispersive coupling {name}: |g/Delta| = {ratio:.3f}")
    return ratio


def sw_effective(device: DeviceSpec) -> EffectiveTwoQubit:
    """
    Parámetros efectivos de dos qubits acoplados a través de acopladores.

    Cada acoplador contribuye al intercambio virtual
    J_{n1n2} = g12 − (g1c·g2c/2)[1/Δ1(n1) + 1/Δ2(n2) + 1/Σ1(n1) + 1/Σ2(n2)],
    con Δ_q(n) = ω_c − ω_q(n) y Σ_q(n) = ω_c + ω_q(n). Los términos en Σ se
    omiten cuando el dispositivo usa RWA.

    Args:
        device: Dispositivo con exactamente dos qubits

    Returns:
        Frecuencias y anarmonicidades vestidas y J_{n1n2} para n1, n2 ∈ {0, 1}

    Raises:
        ConfigError: Si el dispositivo no tiene dos qubits
        DispersiveViolationError: Si algún |g/Δ| ≥ 0.3
    """
    qubits = device.qubit_ids()
    if len(qubits) != 2:
        raise ConfigError(f"se requieren exactamente dos qubits, hay {qubits}")
    nrwa = not device.rwa

    def ladder_of(subsystem_id: str) -> Tuple[float, ...]:
        s = device.subsystem(subsystem_id)
        return subsystem_ladder(s.model_copy(update={'dim': max(s.dim, 4)})).energies

    qubit_energies = [ladder_of(q) for q in qubits]
    qubit_omegas = [np.diff(e) for e in qubit_energies]
    coupler_omegas = {c: ladder_of(c)[1] for c in device.coupler_ids()}

    max_ratio = 0.0
    for q, omegas in zip(qubits, qubit_omegas):
        for c, omega_c in coupler_omegas.items():
            g = device.coupling(q, c)
            if g != 0:
                max_ratio = max(max_ratio, check_dispersive(f"{q}-{c}", g, omega_c - omegas[0]))

    levels = [
        dressed_levels(e, [(w, device.coupling(q, c)) for c, w in coupler_omegas.items()], nrwa)
        for q, e in zip(qubits, qubit_energies)
    ]

    g12 = device.coupling(*qubits)
    J = {}
    for n1 in (0, 1):
        for n2 in (0, 1):
            value = g12
            for c, omega_c in coupler_omegas.items():
                g1c, g2c = device.coupling(qubits[0], c), device.coupling(qubits[1], c)
                w1, w2 = qubit_omegas[0][n1], qubit_omegas[1][n2]
                inverse = 1 / (omega_c - w1) + 1 / (omega_c - w2)
                if nrwa:
                    inverse += 1 / (omega_c + w1) + 1 / (omega_c + w2)
                value -= 0.5 * g1c * g2c * inverse
            J[(n1, n2)] = value

    eff = EffectiveTwoQubit(
        omega1_bar=levels[0][1] - levels[0][0],
        omega2_bar=levels[1][1] - levels[1][0],
        delta1_bar=levels[0][2] - 2 * levels[0][1] + levels[0][0],
        delta2_bar=levels[1][2] - 2 * levels[1][1] + levels[1][0],
        J=J,
        max_ratio=max_ratio,
    )
    logger.debug(f"SW effective parameters: J00={J[(0, 0)]:.6g}, J10={J[(1, 0)]:.6g}, J01={J[(0, 1)]:.6g}")
    return eff


def effective_hamiltonian(eff: EffectiveTwoQubit, ids: Sequence[str]) -> HamiltonianMatrix:
    """
    Hamiltoniano de dos qubits con el acoplador eliminado, tres niveles por qubit.

    H = Σ_q Ē_q(n)|n⟩⟨n| + Σ √((n1+1)(n2+1))·J_{n1n2}(|n1, n2+1⟩⟨n1+1, n2| + h.c.)

    Args:
        eff: Parámetros de `sw_effective`
        ids: Ids de los dos qubits en el orden de `eff`

    Returns:
        Matriz 9×9 en la base (n1, n2) con la energía del fundamental en cero
    """
    dims = (EFFECTIVE_LEVELS, EFFECTIVE_LEVELS)
    basis = basis_labels(dims)
    position = {label: k for k, label in enumerate(basis)}

    def level(omega: float, delta: float, n: int) -> float:
        return n * omega + n * (n - 1) / 2 * delta

    H = np.zeros((len(basis), len(basis)), dtype=complex)
    for (n1, n2), k in position.items():
        H[k, k] = level(eff.omega1_bar, eff.delta1_bar, n1) + level(eff.omega2_bar, eff.delta2_bar, n2)
    for (n1, n2), J in eff.J.items():
        upper, lower = position.get((n1 + 1, n2)), position.get((n1, n2 + 1))
        if upper is None or lower is None:
            continue
        H[lower, upper] = H[upper, lower] = np.sqrt((n1 + 1) * (n2 + 1)) * J

    return HamiltonianMatrix(ids=tuple(ids), dims=dims, matrix=H, basis=tuple(basis))


# ==================== Mínima acción ====================

def _check_partition(partition: Sequence[Sequence[int]], dim: int) -> List[List[int]]:
    blocks = [[int(i) for i in block] for block in partition]
    flat = [i for block in blocks for i in block]
    if sorted(flat) != list(range(dim)):
        raise ConfigError(f"la partición no cubre los índices 0..{dim - 1} de forma disjunta")
    return blocks


def _assign_blocks(vectors: np.ndarray, blocks: List[List[int]]) -> Tuple[List[List[int]], float]:
    """
    Asigna autovectores a bloques por soporte dominante respetando el tamaño
    de cada bloque. Devuelve también el menor soporte de un autovector en su bloque.
    """
    weights = np.abs(vectors) ** 2
    support = np.array([weights[block].sum(axis=0) for block in blocks])
    capacity = [len(block) for block in blocks]
    columns: List[List[int]] = [[] for _ in blocks]

    for k in np.argsort(-support.max(axis=0), kind='stable'):
        for b in np.argsort(-support[:, k], kind='stable'):
            if capacity[b] > 0:
                columns[b].append(int(k))
                capacity[b] -= 1
                break

    min_support = min(float(support[b, k]) for b, cols in enumerate(columns) for k in cols)
    return columns, min_support


def least_action_blockdiag(
    H: Union[HamiltonianMatrix, np.ndarray],
    partition: Sequence[Sequence[int]],
) -> BlockDecomposition:
    """
    Diagonalización por bloques con la transformación más cercana a la identidad.

    Con S la matriz de autovectores y S_BD su parte diagonal por bloques,
    T = S·S_BD†·(S_BD·S_BD†)^{−1/2}, que equivale a T = S·U_BD† con U_BD el
    factor unitario de la descomposición polar de cada bloque.

    Args:
        H: Matriz hermítica
        partition: Conjuntos de índices que forman los bloques; el primero
            es el subespacio de interés y gana los empates

    Returns:
        T, bloques y H_BD = T†HT

    Raises:
        ConfigError: Si la partición no es válida
        DegenerateAssignmentError: Si la matriz no es finita, si algún bloque
            de S_BD es singular o si LAPACK no converge
    """
    matrix = H.matrix if isinstance(H, HamiltonianMatrix) else np.asarray(H, dtype=complex)
    blocks = _check_partition(partition, matrix.shape[0])
    if not np.isfinite(matrix).all():
        logger.error('Non-finite entries in least-action input')
        raise DegenerateAssignmentError('la matriz contiene valores no finitos')

    try:
        _, vectors = eigh(matrix)
        columns, min_support = _assign_blocks(vectors, blocks)

        U_BD = np.zeros_like(vectors)
        for block, cols in zip(blocks, columns):
            sub = vectors[np.ix_(block, cols)]
            if np.linalg.svd(sub, compute_uv=False).min() < 1e-8:
                logger.error(f"Singular block in least-action transform (size {len(block)})")
                raise DegenerateAssignmentError(f"bloque singular de S_BD de tamaño {len(block)}")
            unitary, _ = polar(sub, side='left')
            U_BD[np.ix_(block, cols)] = unitary
    except np.linalg.LinAlgError as e:
        logger.error(f"Least-action decomposition did not converge: {e}")
        raise DegenerateAssignmentError(f"la descomposición no convergió: {e}") from e

    T = vectors @ U_BD.conj().T
    H_BD = T.conj().T @ matrix @ T
    H_BD = 0.5 * (H_BD + H_BD.conj().T)
    return BlockDecomposition(T=T, blocks=tuple(tuple(b) for b in blocks), H_BD=H_BD, min_support=min_support)


# ==================== Pauli ====================

def pauli_decompose(H: np.ndarray) -> PauliCoefficients:
    """
    Coeficientes α_P = Tr[P·H]·2^w/dim de una matriz de 2 o 3 qubits.

    Args:
        H: Matriz hermítica 4×4 u 8×8

    Returns:
        Coeficientes de todas las cadenas de Pauli

    Raises:
        ConfigError: Si la dimensión no es 4 ni 8
    """
    H = np.asarray(H)
    if H.shape not in ((4, 4), (8, 8)):
        raise ConfigError(f"pauli_decompose requiere una matriz 4x4 u 8x8, se recibió {H.shape}")
    n_qubits = int(np.log2(H.shape[0]))
    dim = H.shape[0]
    coefficients = {
        label: float(np.real(np.trace(P @ H))) * 2 ** pauli_weight(label) / dim
        for label, P in pauli_basis(n_qubits).items()
    }
    return PauliCoefficients(n_qubits=n_qubits, coefficients=coefficients)


def reconstruct(coefficients: PauliCoefficients) -> np.ndarray:
    """Σ α_P·P/2^w"""
    return coefficients.reconstruct()
