"""
Interacción de tres qubits: eliminación de acopladores, Hamiltoniano efectivo
de qubits y coeficientes ZZI, ZIZ, IZZ y ZZZ por seis métodos.
"""
import math
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..hamiltonian.models import HamiltonianMatrix
from ..shared.errors import PoleProximityError
from ..shared.logger import get_logger
from ..shared.operators import basis_labels
from ..shared.parallel import parallel_map
from ..transforms.models import PauliCoefficients
from ..transforms.services import (
    check_dispersive,
    dressed_levels,
    dressed_transform,
    least_action_blockdiag,
    pauli_decompose,
)
from .models import (
    PAIRS,
    THREE_Q_TERMS,
    EffectiveThreeQubit,
    Method,
    ThreeQubitDevice,
    ThreeQubitPauli,
)

logger = get_logger(__name__)

QUBIT_LEVELS = 3
COLLISION_WINDOW = 0.005
IDS = ('q1', 'q2', 'q3')
COMPUTATIONAL = [tuple(label) for label in basis_labels([2, 2, 2])]


# ==================== Acopladores ====================

def _bare_energies(omega: float, delta: float) -> List[float]:
    return [n * omega + n * (n - 1) / 2 * delta for n in range(4)]


def effective_couplings(dev: ThreeQubitDevice, nrwa: bool = False) -> EffectiveThreeQubit:
    """
    Elimina los acopladores por Schrieffer-Wolff.

    J^{nm}_{qq'} = g_{qq'} − Σ_i (g_{qc_i}·g_{q'c_i}/2)[1/Δ_q(n) + 1/Δ_{q'}(m) + 1/Σ_q(n) + 1/Σ_{q'}(m)]
    con Δ_q(n) = ω_{c_i} − ω_q(n) y Σ_q(n) = ω_{c_i} + ω_q(n); los términos en
    Σ sólo se incluyen con `nrwa`.

    Args:
        dev: Dispositivo de tres qubits
        nrwa: Si se conservan los términos contra-rotantes

    Returns:
        Niveles vestidos Ē_q(n) y J dependiente de los niveles

    Raises:
        DispersiveViolationError: Si algún |g/Δ| ≥ 0.3
    """
    energies = [_bare_energies(w, d) for w, d in zip(dev.omega, dev.delta)]
    omegas = [np.diff(e) for e in energies]

    max_ratio = 0.0
    levels = []
    for q in range(3):
        couplers = [(c.omega, c.g[q]) for c in dev.couplers if c.g[q] != 0]
        for i, (omega_c, g) in enumerate(couplers):
            max_ratio = max(max_ratio, check_dispersive(f"{IDS[q]}-c{i + 1}", g, omega_c - omegas[q][0]))
        levels.append(tuple(float(x) for x in dressed_levels(energies[q], couplers, nrwa)))

    J: Dict[Tuple[int, int, int, int], float] = {}
    for q, p in PAIRS:
        for n, m in product((0, 1), repeat=2):
            value = dev.direct(q, p)
            for c in dev.couplers:
                wq, wp = omegas[q][n], omegas[p][m]
                inverse = 1 / (c.omega - wq) + 1 / (c.omega - wp)
                if nrwa:
                    inverse += 1 / (c.omega + wq) + 1 / (c.omega + wp)
                value -= 0.5 * c.g[q] * c.g[p] * inverse
            J[(q, p, n, m)] = value

    return EffectiveThreeQubit(levels=tuple(levels), J=J, nrwa=nrwa, max_ratio=max_ratio)


def frequency_collisions(eff: EffectiveThreeQubit) -> List[Tuple[int, int, int, int]]:
    """Pares (q, q', n, m) con |ω̄_q(n) − ω̄_{q'}(m)| < 5 MHz"""
    collisions = [
        (q, p, n, m)
        for q, p in PAIRS
        for n, m in product((0, 1), repeat=2)
        if abs(eff.omega_bar(q, n) - eff.omega_bar(p, m)) < COLLISION_WINDOW
    ]
    if collisions:
        logger.warning(f"Near-degenerate qubit transitions: {collisions}")
    return collisions


# ==================== Hamiltoniano de qubits ====================

def qubit_hamiltonian(eff: EffectiveThreeQubit, state_dependent: bool, nrwa: bool) -> HamiltonianMatrix:
    """
    Hamiltoniano efectivo de tres qubits con tres niveles cada uno.

    El intercambio −J(a_q − a_q†)(a_{q'} − a_{q'}†) usa J^{nm} de los niveles
    involucrados o, si `state_dependent` es falso, un único J^{01} por par.

    Args:
        eff: Parámetros efectivos
        state_dependent: Si J depende de los niveles
        nrwa: Si se incluyen los términos a_q·a_{q'} y a_q†·a_{q'}†

    Returns:
        Matriz 27×27 en la base |n1 n2 n3⟩
    """
    dims = (QUBIT_LEVELS,) * 3
    basis = [tuple(label) for label in basis_labels(dims)]
    index = {label: k for k, label in enumerate(basis)}
    H = np.diag([sum(eff.levels[q][label[q]] for q in range(3)) for label in basis]).astype(complex)

    for label in basis:
        for q, p in PAIRS:
            n, m = label[q], label[p]
            if n >= QUBIT_LEVELS - 1 or m >= QUBIT_LEVELS - 1:
                continue
            J = eff.j(q, p, n, m) if state_dependent else eff.j(q, p, 0, 1)
            amplitude = math.sqrt((n + 1) * (m + 1)) * J

            raised_q = list(label)
            raised_q[q] += 1
            raised_p = list(label)
            raised_p[p] += 1
            a, b = index[tuple(raised_q)], index[tuple(raised_p)]
            H[a, b] = H[b, a] = amplitude

            if nrwa:
                both = list(label)
                both[q] += 1
                both[p] += 1
                c, k = index[tuple(both)], index[label]
                H[c, k] = H[k, c] = -amplitude

    return HamiltonianMatrix(ids=IDS, dims=dims, matrix=H, basis=tuple(basis))


def computational_hamiltonian(dev: ThreeQubitDevice, method: Method) -> HamiltonianMatrix:
    """Hamiltoniano de qubits 27×27 usado por los métodos SSW y SW"""
    method = Method(method)
    eff = effective_couplings(dev, method.nrwa)
    return qubit_hamiltonian(eff, method.state_dependent, method.nrwa)


# ==================== Perturbaciones ====================

class _PTParameters:
    """ω̄_q, δ̄_q y J_{qq'} = J^{01}_{qq'} de las fórmulas perturbativas"""

    def __init__(self, eff: EffectiveThreeQubit):
        self.w = [eff.omega_bar(q, 0) for q in range(3)]
        self.d = [eff.omega_bar(q, 1) - eff.omega_bar(q, 0) for q in range(3)]
        self._J = {pair: eff.j(*pair, 0, 1) for pair in PAIRS}
        self.triple = self._J[(0, 1)] * self._J[(0, 2)] * self._J[(1, 2)]

    def J(self, i: int, j: int) -> float:
        return self._J[(min(i, j), max(i, j))]

    def D(self, i: int, j: int) -> float:
        return self.w[i] - self.w[j]

    def S(self, i: int, j: int) -> float:
        return self.w[i] + self.w[j]


def _other(i: int, j: int) -> int:
    return 3 - i - j


def _triple_terms(p: _PTParameters, i: int, j: int) -> Tuple[float, float, float]:
    """A_ijk, B_ijk y C_ijk"""
    k = _other(i, j)
    d, D = p.d, p.D
    A = (d[i] * d[j] - d[i] * D(i, k) - d[j] * D(j, k)) / (D(i, k) * D(j, k))
    B = (d[i] ** 2 + d[j] ** 2 + d[i] * d[j] + d[i] * D(i, k) + d[j] * D(j, k)) / ((D(i, k) + d[i]) * (D(j, k) + d[j]))
    C = (d[i] * d[j] + d[j] * d[k] + d[i] * d[k] - d[i] * D(i, k) - d[j] * D(j, k)) / ((D(i, k) - d[k]) * (D(j, k) - d[k]))
    return A, B, C


def _pole(p: _PTParameters, i: int, j: int) -> float:
    return (p.D(i, j) + p.d[i]) * (p.D(i, j) - p.d[j])


def _two_body(p: _PTParameters, i: int, j: int) -> float:
    A, B, C = _triple_terms(p, i, j)
    return (2 * p.J(i, j) ** 2 * (p.d[i] + p.d[j]) - 4 * p.triple * (A + B + C)) / _pole(p, i, j)


def _three_body(p: _PTParameters) -> float:
    _, B, C = _triple_terms(p, 0, 1)
    return 8 * p.triple * (B + C) / _pole(p, 0, 1)


def rwa_pt_coefficients(eff: EffectiveThreeQubit) -> PauliCoefficients:
    """
    Coeficientes de Pauli por perturbaciones hasta tercer orden sin términos
    contra-rotantes, en forma cerrada.

    α_{ZZI} = [2J12²(δ1+δ2) − 4J12·J13·J23(A123+B123+C123)] / [(Δ12+δ1)(Δ12−δ2)],
    α_{ZZZ} = 8J12·J13·J23(B123+C123) / [(Δ12+δ1)(Δ12−δ2)] y los de un cuerpo
    α_{ZII} = −ω̄1 − J12²/Δ12 − J13²/Δ13 − 2J12·J13·J23/(Δ12·Δ13) − α_{ZZI}/2 − α_{ZIZ}/2 − α_{ZZZ}/4,
    con Δ_ij = ω̄_i − ω̄_j y los demás por permutación de índices.

    Args:
        eff: Parámetros efectivos; se usa J^{01} para todos los niveles

    Returns:
        Coeficientes ZII, IZI, IIZ, ZZI, ZIZ, IZZ y ZZZ

    Raises:
        PoleProximityError: Si dos transiciones coinciden exactamente
    """
    p = _PTParameters(eff)
    try:
        two = {(i, j): _two_body(p, i, j) for i, j in PAIRS}
        zzz = _three_body(p)
    except ZeroDivisionError as e:
        logger.error(f"Perturbative pole hit: omega={p.w}, delta={p.d}")
        raise PoleProximityError(f"denominador nulo en las fórmulas perturbativas: {e}") from e

    one = []
    for i in range(3):
        j, k = [q for q in range(3) if q != i]
        one.append(
            -p.w[i]
            - p.J(i, j) ** 2 / p.D(i, j)
            - p.J(i, k) ** 2 / p.D(i, k)
            - 2 * p.triple / (p.D(i, j) * p.D(i, k))
            - two[tuple(sorted((i, j)))] / 2
            - two[tuple(sorted((i, k)))] / 2
            - zzz / 4
        )

    coefficients = {
        'ZII': one[0], 'IZI': one[1], 'IIZ': one[2],
        'ZZI': two[(0, 1)], 'ZIZ': two[(0, 2)], 'IZZ': two[(1, 2)],
        'ZZZ': zzz,
    }
    return PauliCoefficients(n_qubits=3, coefficients=coefficients)


def _counter_rotating_level(p: _PTParameters, label: Tuple[int, ...]) -> float:
    d, D, S = p.d, p.D, p.S
    excited = [q for q in range(3) if label[q]]

    second = 0.0
    for i, j in PAIRS:
        J2 = p.J(i, j) ** 2
        if label[i] and label[j]:
            second += J2 / S(i, j) - 4 * J2 / (S(i, j) + d[i] + d[j])
        elif label[i] or label[j]:
            e = i if label[i] else j
            second -= 2 * J2 / (S(i, j) + d[e])
        else:
            second -= J2 / S(i, j)

    sums = S(0, 1) + S(0, 2) + S(1, 2)
    if not excited:
        bracket = sums / (S(0, 1) * S(0, 2) * S(1, 2))
    elif len(excited) == 1:
        k = excited[0]
        i, j = [q for q in range(3) if q != k]
        a, b = S(i, k) + d[k], S(j, k) + d[k]
        bracket = (
            2 / (S(i, j) * a) + 2 / (S(i, j) * b) + 2 / (a * b)
            - 1 / (D(k, i) * S(i, j)) - 1 / (D(k, j) * S(i, j))
        )
    elif len(excited) == 2:
        i, j = excited
        k = _other(i, j)
        a, b = S(k, i) + d[i], S(k, j) + d[j]
        c = S(i, j) + d[i] + d[j]
        bracket = (
            1 / (S(i, j) * D(i, k)) + 1 / (S(i, j) * D(j, k))
            - 2 / a * (1 / D(j, k) + 1 / (D(j, i) - d[i]))
            - 2 / b * (1 / D(i, k) + 1 / (D(i, j) - d[j]))
            + 4 * (2 * d[i] + 2 * d[j] + sums) / (c * a * b)
        )
    else:
        bracket = sums / (S(0, 1) * S(0, 2) * S(1, 2))
        poles = 1.0
        for i, j in PAIRS:
            k = _other(i, j)
            c = S(i, j) + d[i] + d[j]
            bracket += 2 / S(i, j) * (1 / (D(i, k) - d[k]) + 1 / (D(j, k) - d[k]))
            bracket += 4 / c * (1 / (D(i, k) + d[i]) + 1 / (D(j, k) + d[j]))
            poles *= c
        bracket += 8 * (2 * sum(d) + sums) / poles

    return second + 2 * p.triple * bracket


def counter_rotating_shifts(dev: ThreeQubitDevice) -> Dict[Tuple[int, ...], float]:
    """
    Desplazamiento E^coun de cada nivel computacional debido a los términos
    contra-rotantes del intercambio, hasta tercer orden.

    A segundo orden cada par aporta −J²/Σ_ij sin excitaciones, −2J²/(Σ_ij+δ_e)
    con una y J²/Σ_ij − 4J²/(Σ_ij+δ_i+δ_j) con ambas (Σ_ij = ω̄_i + ω̄_j). El
    tercer orden mezcla saltos rápidos y lentos y es proporcional a J12·J13·J23.

    Args:
        dev: Dispositivo de tres qubits; J incluye los términos en Σ

    Returns:
        Etiqueta |n1 n2 n3⟩ → desplazamiento en GHz

    Raises:
        PoleProximityError: Si algún denominador se anula
    """
    p = _PTParameters(effective_couplings(dev, nrwa=True))
    try:
        return {label: _counter_rotating_level(p, label) for label in COMPUTATIONAL}
    except ZeroDivisionError as e:
        logger.error(f"Counter-rotating pole hit: omega={p.w}, delta={p.d}")
        raise PoleProximityError(f"denominador nulo en los desplazamientos contra-rotantes: {e}") from e


def rayleigh_schrodinger_energies(H: HamiltonianMatrix) -> Dict[Tuple[int, ...], float]:
    """
    Energías de Rayleigh-Schrödinger hasta tercer orden de los ocho niveles
    computacionales, evaluadas numéricamente sobre la matriz completa.
    """
    H0 = np.real(np.diag(H.matrix))
    V = np.real(H.matrix - np.diag(H0))
    energies = {}
    for label in COMPUTATIONAL:
        k = H.index_of(label)
        denominators = H0[k] - H0
        coupled = np.abs(V[:, k]) > 0
        coupled[k] = False
        if np.any(np.abs(denominators[coupled]) < 1e-12):
            logger.error(f"Degenerate intermediate state for {label}")
            raise PoleProximityError(f"estado intermedio degenerado con {label}")
        inverse = np.zeros_like(H0)
        inverse[coupled] = 1 / denominators[coupled]
        w = V[:, k] * inverse
        second = float(V[k] @ w)
        third = float(w @ V @ w)
        energies[label] = H0[k] + second + third
    return energies


# ==================== Coeficientes ====================

def _block_energies(H: HamiltonianMatrix) -> Dict[Tuple[int, ...], float]:
    """Separa el bloque computacional por mínima acción y lo diagonaliza"""
    comp = [H.index_of(label) for label in COMPUTATIONAL]
    inside = set(comp)
    rest = [k for k in range(H.dim) if k not in inside]
    decomposition = least_action_blockdiag(H.matrix, [comp, rest])
    if decomposition.flagged:
        logger.warning('Computational block of the three-qubit Hamiltonian poorly separated')

    block = HamiltonianMatrix(ids=IDS, dims=(2, 2, 2), matrix=decomposition.block(0), basis=tuple(COMPUTATIONAL))
    values = dressed_transform(block).energies
    return dict(zip(COMPUTATIONAL, (float(v) for v in values)))


def three_q_pauli(dev: ThreeQubitDevice, method: Method) -> ThreeQubitPauli:
    """
    Coeficientes α de H_eff = Σ α_P·P/2^w en el subespacio computacional.

    PT usa las formas cerradas a tercer orden con J independiente del nivel y,
    en NRWA, suma los desplazamientos E^coun. SSW y SW separan el bloque
    computacional del Hamiltoniano de qubits y lo diagonalizan; sus variantes
    NRWA incluyen los términos contra-rotantes en la matriz.

    Args:
        dev: Dispositivo de tres qubits
        method: Uno de los seis métodos

    Returns:
        Coeficientes de Pauli, marcados si hay colisión de frecuencias
    """
    method = Method(method)
    eff = effective_couplings(dev, method.nrwa)
    flagged = bool(frequency_collisions(eff))

    if method.approach == 'PT':
        pauli = rwa_pt_coefficients(eff)
        if method.nrwa:
            shifts = counter_rotating_shifts(dev)
            counter = pauli_decompose(np.diag([shifts[label] for label in COMPUTATIONAL]))
            pauli = PauliCoefficients(
                n_qubits=3,
                coefficients={label: pauli[label] + counter[label] for label in THREE_Q_TERMS},
            )
    else:
        energies = _block_energies(qubit_hamiltonian(eff, method.state_dependent, method.nrwa))
        pauli = pauli_decompose(np.diag([energies[label] for label in COMPUTATIONAL]))
    logger.debug(f"{method.value}: ZZZ={pauli['ZZZ']:.6g} GHz")
    return ThreeQubitPauli(method=method, pauli=pauli, flagged=flagged)


def method_comparison(
    dev: ThreeQubitDevice,
    methods: Optional[Sequence[Method]] = None,
    jobs: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Tabla de coeficientes por método.

    Returns:
        Filas (method, label, value, flagged) en el orden de `methods` y de los términos
    """
    methods = [Method(m) for m in (methods or list(Method))]
    results = parallel_map(lambda m: three_q_pauli(dev, m), methods, jobs=jobs, desc='method')
    rows = [
        {'method': result.method.value, 'label': label, 'value': result.alpha(label), 'flagged': result.flagged}
        for result in results
        for label in THREE_Q_TERMS
    ]
    logger.info(f"Three-qubit comparison finished for {len(methods)} methods")
    return rows
