"""
ZZ estático: diagonalización exacta, Schrieffer-Wolff, teoría de
perturbaciones de cuarto orden y búsqueda de ceros sobre parámetros del
dispositivo.
"""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from ..hamiltonian.models import DeviceSpec, SubsystemKind
from ..hamiltonian.services import build_static, computational_labels, subsystem_ladder, with_parameter
from ..shared.errors import ConfigError, NoFiniteSolutionError, NumericalDomainError
from ..shared.logger import get_logger
from ..shared.operators import basis_labels
from ..shared.parallel import parallel_map
from ..transforms.models import DressedSpectrum, EffectiveTwoQubit
from ..transforms.services import check_dispersive, diagonalize_labeled, effective_hamiltonian, sw_effective
from .models import FreedomCondition, PerturbativeZZ, StaticZZReport, TunableCouplerParams

logger = get_logger(__name__)

Evaluator = Callable[[DeviceSpec], float]

DEFAULT_GRID = 64
POLE_MARGIN = 5.0


# ==================== Exacto ====================

def zz_from_spectrum(spectrum: DressedSpectrum, labels: Sequence[Tuple[int, ...]]) -> float:
    """ζ = Ẽ11 − Ẽ10 − Ẽ01 + Ẽ00 con las etiquetas en orden 00, 01, 10, 11"""
    e00, e01, e10, e11 = (spectrum.energy(label) for label in labels)
    return e11 - e10 - e01 + e00


def _require_two_qubits(device: DeviceSpec) -> List[str]:
    qubits = device.qubit_ids()
    if len(qubits) != 2:
        raise ConfigError(f"se requieren exactamente dos qubits, hay {qubits}")
    return qubits


def static_zz_exact(device: DeviceSpec) -> float:
    """
    ZZ estático por diagonalización completa y etiquetado vestido.

    Args:
        device: Dispositivo con dos qubits y cualquier número de acopladores

    Returns:
        ζ en GHz
    """
    _require_two_qubits(device)
    spectrum = diagonalize_labeled(build_static(device))
    return zz_from_spectrum(spectrum, computational_labels(device))


def static_zz_effective(device: DeviceSpec) -> float:
    """ZZ estático exacto del modelo de dos qubits con los acopladores eliminados"""
    qubits = _require_two_qubits(device)
    spectrum = diagonalize_labeled(effective_hamiltonian(sw_effective(device), qubits))
    return zz_from_spectrum(spectrum, basis_labels([2, 2]))


# ==================== Schrieffer-Wolff ====================

def static_zz_sw(eff: EffectiveTwoQubit) -> float:
    """
    ζ = 2J10²/(Δ̄ − δ̄1) − 2J01²/(Δ̄ + δ̄2) con Δ̄ = ω̄2 − ω̄1.

    Args:
        eff: Parámetros efectivos vestidos

    Returns:
        ζ en GHz
    """
    J10, J01 = eff.j(1, 0), eff.j(0, 1)
    first = eff.detuning - eff.delta1_bar
    second = eff.detuning + eff.delta2_bar

    if abs(first) < POLE_MARGIN * abs(J10) or abs(second) < POLE_MARGIN * abs(J01):
        logger.warning(f"SW ZZ evaluated near a pole: Delta-delta1={first:.4g}, Delta+delta2={second:.4g}")

    zeta = 0.0
    if J10 != 0:
        zeta += 2 * J10 ** 2 / first
    if J01 != 0:
        zeta -= 2 * J01 ** 2 / second
    return zeta


def zz_freedom_condition(eff: EffectiveTwoQubit) -> FreedomCondition:
    """
    Desintonía que anula el ZZ de segundo orden: Δ̄ = (δ̄1 + δ̄2·γ²)/(1 − γ²).

    Args:
        eff: Parámetros efectivos vestidos

    Returns:
        γ y Δ̄ requerido

    Raises:
        NoFiniteSolutionError: Si J01 = 0 o γ² = 1
    """
    if eff.j(0, 1) == 0:
        raise NoFiniteSolutionError('J01 = 0: γ no está definido')
    gamma = eff.gamma
    if abs(1 - gamma ** 2) < 1e-12:
        raise NoFiniteSolutionError(f"γ² = 1 (γ = {gamma}): la condición no tiene solución finita")
    return FreedomCondition(
        gamma=gamma,
        delta_bar_required=(eff.delta1_bar + eff.delta2_bar * gamma ** 2) / (1 - gamma ** 2),
    )


def gamma_closed_form(delta: float, delta2_c: float, delta1: float, delta2: float) -> float:
    """
    γ = J10/J01 sin acoplamiento directo ni términos contra-rotantes.

    Args:
        delta: Δ = ω2 − ω1
        delta2_c: Δ2 = ω_c − ω2
        delta1: Anarmonicidad del qubit 1
        delta2: Anarmonicidad del qubit 2

    Returns:
        γ
    """
    total = 2 * delta2_c + delta
    return (
        (1 - delta1 / total) / (1 - delta2 / total)
        * (1 - delta2 / delta2_c) / (1 - delta1 / (delta2_c + delta))
    )


def zz_freedom_analytic_k(b: float) -> float:
    """
    Solución de orden cero k = (2 + b − 3b² − 2b³)/(2 + 5b + b²) para
    δ1 = kδ, δ2 = −δ y Δ = b·Δ2 con δ/Δ2 → 0.
    """
    return (2 + b - 3 * b ** 2 - 2 * b ** 3) / (2 + 5 * b + b ** 2)


# ==================== Cuarto orden ====================

def tunable_coupler_params(device: DeviceSpec) -> TunableCouplerParams:
    """
    Extrae la topología qubit-acoplador-qubit de un dispositivo.

    Raises:
        ConfigError: Si el dispositivo no tiene dos qubits y un único acoplador
    """
    qubits = _require_two_qubits(device)
    couplers = device.coupler_ids()
    if len(couplers) != 1:
        raise ConfigError(f"se requiere exactamente un acoplador, hay {couplers}")

    def ladder_of(subsystem_id: str):
        s = device.subsystem(subsystem_id)
        return subsystem_ladder(s.model_copy(update={'dim': max(s.dim, 3)}))

    q1, q2, c = ladder_of(qubits[0]), ladder_of(qubits[1]), ladder_of(couplers[0])
    return TunableCouplerParams(
        omega1=q1.omega01, omega2=q2.omega01, omega_c=c.omega01,
        delta1=q1.anharmonicity, delta2=q2.anharmonicity, delta_c=c.anharmonicity,
        g1c=device.coupling(qubits[0], couplers[0]),
        g2c=device.coupling(qubits[1], couplers[0]),
        g12=device.coupling(*qubits),
    )


def static_zz_pt4(p: TunableCouplerParams) -> PerturbativeZZ:
    """
    ZZ estático hasta cuarto orden en los acoplamientos.

    Args:
        p: Parámetros de la topología qubit-acoplador-qubit

    Returns:
        ζ = ζ2 + ζ3 + ζ4 y cada contribución

    Raises:
        DispersiveViolationError: Si algún |g/Δ| ≥ 0.3
    """
    d12 = p.omega1 - p.omega2
    d1c = p.omega1 - p.omega_c
    d2c = p.omega2 - p.omega_c
    check_dispersive('q1-c', p.g1c, d1c)
    check_dispersive('q2-c', p.g2c, d2c)

    zeta2 = 2 * p.g12 ** 2 * (1 / (d12 - p.delta2) - 1 / (d12 + p.delta1))
    zeta3 = 2 * p.g1c * p.g2c * p.g12 * (
        2 / ((d12 - p.delta2) * d1c)
        - 2 / ((d12 + p.delta1) * d2c)
        + 1 / (d1c * d2c)
        + 1 / (d12 * d2c)
        - 1 / (d12 * d1c)
    )
    zeta4 = p.g1c ** 2 * p.g2c ** 2 * (
        2 * (1 / d1c + 1 / d2c) ** 2 / (d1c + d2c - p.delta_c)
        - 2 / (d2c ** 2 * (d12 + p.delta1))
        + 2 / (d1c ** 2 * (d12 - p.delta2))
        - (1 / d2c + 1 / d12) / d1c ** 2
        - (1 / d1c - 1 / d12) / d2c ** 2
    )
    return PerturbativeZZ(zeta=zeta2 + zeta3 + zeta4, zeta2=zeta2, zeta3=zeta3, zeta4=zeta4)


def has_tunable_coupler(device: DeviceSpec) -> bool:
    """True si hay un único acoplador y no es un resonador"""
    couplers = device.coupler_ids()
    return len(couplers) == 1 and device.subsystem(couplers[0]).kind != SubsystemKind.RESONATOR


def static_zz_report(device: DeviceSpec) -> StaticZZReport:
    """
    Combina los valores exacto, SW y de cuarto orden de un dispositivo.

    Los métodos perturbativos que salen de su dominio se reportan como ausentes.
    """
    _require_two_qubits(device)
    spectrum = diagonalize_labeled(build_static(device))
    zeta_exact = zz_from_spectrum(spectrum, computational_labels(device))

    zeta_sw = None
    try:
        zeta_sw = static_zz_sw(sw_effective(device))
    except NumericalDomainError as e:
        logger.warning(f"SW ZZ unavailable: {e}")

    zeta_pt4 = None
    if has_tunable_coupler(device):
        try:
            zeta_pt4 = static_zz_pt4(tunable_coupler_params(device)).zeta
        except NumericalDomainError as e:
            logger.warning(f"Fourth-order ZZ unavailable: {e}")

    return StaticZZReport(zeta_exact=zeta_exact, zeta_sw=zeta_sw, zeta_pt4=zeta_pt4, flagged=spectrum.flagged)


EVALUATORS: Dict[str, Evaluator] = {
    'exact': static_zz_exact,
    'effective': static_zz_effective,
    'sw': lambda device: static_zz_sw(sw_effective(device)),
    'pt4': lambda device: static_zz_pt4(tunable_coupler_params(device)).zeta,
}


def get_evaluator(method: str) -> Evaluator:
    try:
        return EVALUATORS[method]
    except KeyError:
        raise ConfigError(f"método desconocido '{method}', opciones: {', '.join(EVALUATORS)}")


# ==================== Barridos ====================

def zz_sweep(
    device: DeviceSpec,
    path: str,
    values: Sequence[float],
    evaluator: Callable[[DeviceSpec], Any] = static_zz_exact,
    jobs: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Evalúa `evaluator` a lo largo de un parámetro del dispositivo.

    Args:
        device: Dispositivo base
        path: Ruta del parámetro (ver `with_parameter`)
        values: Valores del parámetro
        evaluator: Función del dispositivo; si devuelve un dict sus claves
            se agregan a la fila
        jobs: Hilos (None usa DEFAULT_JOBS)

    Returns:
        Filas en el orden de `values`
    """
    def evaluate(value: float) -> Dict[str, Any]:
        result = evaluator(with_parameter(device, path, float(value)))
        if isinstance(result, dict):
            return {path: float(value), **result}
        return {path: float(value), 'zeta': float(result)}

    rows = parallel_map(evaluate, list(values), jobs=jobs, desc=path)
    logger.info(f"Sweep over {path} finished with {len(rows)} points")
    return rows


def find_zero(
    device: DeviceSpec,
    path: str,
    evaluator: Evaluator,
    bounds: Tuple[float, float],
    tol: float = 1e-6,
    points: int = DEFAULT_GRID,
    jobs: Optional[int] = None,
) -> List[float]:
    """
    Raíces de `evaluator` a lo largo de un parámetro.

    Se evalúa una grilla de al menos 64 puntos y cada cambio de signo se
    refina por bisección hasta `tol`. Los cambios de signo en los que el valor
    crece durante el refinamiento corresponden a polos y se descartan.

    Args:
        device: Dispositivo base
        path: Ruta del parámetro
        evaluator: Función dispositivo → GHz
        bounds: Intervalo (inicio, fin)
        tol: Tolerancia en unidades del parámetro
        points: Puntos de la grilla (mínimo 64)
        jobs: Hilos para la grilla

    Returns:
        Raíces en orden creciente; lista vacía si no hay cambio de signo
    """
    lo, hi = sorted(bounds)
    grid = np.linspace(lo, hi, max(points, DEFAULT_GRID))
    values = np.array([row['zeta'] for row in zz_sweep(device, path, grid, evaluator, jobs)])

    def at(x: float) -> float:
        return evaluator(with_parameter(device, path, float(x)))

    roots = []
    for k in range(len(grid) - 1):
        a, b = grid[k], grid[k + 1]
        fa, fb = values[k], values[k + 1]
        if fa == 0:
            roots.append(float(a))
            continue
        if np.sign(fa) == np.sign(fb) or fb == 0:
            continue
        root = bisect(at, a, b, xtol=tol)
        if abs(at(root)) > max(abs(fa), abs(fb)):
            logger.warning(f"Discarding sign change at {path}={root:.6g}: pole")
            continue
        roots.append(float(root))
    if values[-1] == 0:
        roots.append(float(grid[-1]))

    logger.info(f"Found {len(roots)} zero(s) of ZZ over {path} in [{lo}, {hi}]")
    return roots
