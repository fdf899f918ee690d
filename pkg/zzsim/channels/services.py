"""
Canales cuánticos y fidelidad: matrices de transferencia de Pauli, mapas de
decoherencia, error de la secuencia CR eco, desfase por ruido de flujo y
acumulación de fase del gate CZ.
"""
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.optimize import brentq, minimize_scalar

from ..cr.models import CRCoefficients
from ..cr.services import (
    active_cancellation,
    calibrate_zx90,
    cr_pauli_coefficients,
    crosstalk_scale,
    segment_length,
)
from ..hamiltonian.models import DeviceSpec, DriveSpec, HamiltonianMatrix
from ..hamiltonian.services import build_static, label_index, resolve_target, subsystem_ladder, with_parameter
from ..shared.errors import (
    ConfigError,
    DomainError,
    InfeasibleGateLengthError,
    NoFiniteSolutionError,
    PoleProximityError,
    RejectedPathError,
)
from ..shared.logger import get_logger
from ..shared.operators import pauli_basis, pauli_string
from ..shared.parallel import parallel_map
from ..spectra.services import flux_derivative
from .models import CoherenceTimes, DegenerateGap, DephasingModel, GateError, QuantumChannel

logger = get_logger(__name__)

UNITARITY_TOL = 1e-10
CR_SEGMENT_TERMS = ('ZI', 'IX', 'IY', 'ZX', 'ZY')
ZZ_POLE = 5.7
CZ_FLUX_RANGE = (0.0, 0.5)


# ==================== Matrices de transferencia ====================

def ptm_of_unitary(U: np.ndarray) -> QuantumChannel:
    """
    Matriz de transferencia de Pauli de ρ → UρU†.

    Args:
        U: Unitaria de uno o dos qubits

    Returns:
        Canal con R_ij = Tr[P_i·U·P_j·U†]/d

    Raises:
        ConfigError: Si U no es unitaria o no es de 2×2 o 4×4
    """
    U = np.asarray(U, dtype=complex)
    dim = U.shape[0]
    if U.shape != (dim, dim) or dim not in (2, 4):
        raise ConfigError(f"unitaria de forma no soportada: {U.shape}")
    if not np.allclose(U.conj().T @ U, np.eye(dim), atol=UNITARITY_TOL):
        raise ConfigError('la matriz no es unitaria')

    paulis = list(pauli_basis(dim.bit_length() - 1).values())
    ptm = np.array([
        [np.trace(P_i @ U @ P_j @ U.conj().T).real / dim for P_j in paulis]
        for P_i in paulis
    ])
    return QuantumChannel(ptm=ptm)


def unitary_channel(H: np.ndarray, t: float) -> QuantumChannel:
    """Canal de la evolución U = exp(−i2π·H·t) con H en GHz y t en ns"""
    return ptm_of_unitary(expm(-2j * math.pi * np.asarray(H) * t))


def compose(*channels: QuantumChannel) -> QuantumChannel:
    """Composición secuencial: el primer canal se aplica primero"""
    if not channels:
        raise ConfigError('se requiere al menos un canal')
    ptm = channels[0].ptm
    for channel in channels[1:]:
        if channel.ptm.shape != ptm.shape:
            raise ConfigError('los canales compuestos deben actuar sobre el mismo número de qubits')
        ptm = channel.ptm @ ptm
    return QuantumChannel(ptm=ptm)


def tensor(first: QuantumChannel, second: QuantumChannel) -> QuantumChannel:
    """Canal producto; `first` actúa sobre el qubit más significativo"""
    return QuantumChannel(ptm=np.kron(first.ptm, second.ptm))


def identity_channel(n_qubits: int = 2) -> QuantumChannel:
    return QuantumChannel(ptm=np.eye(4 ** n_qubits))


def decoherence_channel(ct: CoherenceTimes, t: float) -> QuantumChannel:
    """
    Relajación y desfase de un qubit durante `t`.

    Args:
        ct: T1 y T2 en μs
        t: Duración en ns

    Returns:
        Canal de un qubit: X e Y decaen como e^{−t/T2} y la población
        excitada relaja con peso 1 − e^{−t/T1}
    """
    if t < 0:
        raise ConfigError(f"la duración debe ser no negativa: {t}")
    t_us = t * 1e-3
    gamma1 = 1 - math.exp(-t_us / ct.T1)
    coherence = math.exp(-t_us / ct.T2)
    ptm = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, coherence, 0.0, 0.0],
        [0.0, 0.0, coherence, 0.0],
        [gamma1, 0.0, 0.0, 1 - gamma1],
    ])
    return QuantumChannel(ptm=ptm)


def two_qubit_decoherence(coherence: Tuple[CoherenceTimes, CoherenceTimes], t: float) -> QuantumChannel:
    """Decoherencia independiente de ambos qubits durante `t` (ns)"""
    return tensor(decoherence_channel(coherence[0], t), decoherence_channel(coherence[1], t))


# ==================== Fidelidad ====================

def average_gate_fidelity(channel: QuantumChannel, ideal: QuantumChannel) -> float:
    """F = (Tr[R_idealᵀ·R]/d + 1)/(d + 1)"""
    if channel.ptm.shape != ideal.ptm.shape:
        raise ConfigError('los canales comparados deben tener la misma dimensión')
    d = channel.dim
    return float((np.trace(ideal.ptm.T @ channel.ptm) / d + 1) / (d + 1))


def zx90_unitary(sign: float = 1.0) -> np.ndarray:
    """exp(−i·sign·(π/2)·ZX/2)"""
    return expm(-1j * math.copysign(1.0, sign) * (math.pi / 4) * pauli_string('ZX'))


def cr_segment_hamiltonian(coeffs: CRCoefficients) -> np.ndarray:
    """Σ β_P·P/2 sobre los términos que actúan durante un segmento CR"""
    return sum(coeffs.beta(label) * pauli_string(label) / 2 for label in CR_SEGMENT_TERMS)


def echoed_cr_error(
    plus: CRCoefficients,
    minus: CRCoefficients,
    tau: float,
    gate_length: float,
    coherence: Optional[Tuple[CoherenceTimes, CoherenceTimes]] = None,
    zeta_static: float = 0.0,
) -> GateError:
    """
    Error del ZX90 por CR eco: CR+ → XI → CR− → XI → ZZ → decoherencia.

    Args:
        plus: Coeficientes con amplitud +Ω
        minus: Coeficientes con amplitud −Ω
        tau: Duración de cada segmento CR (ns)
        gate_length: Duración total (ns), usada por el ZZ y la decoherencia
        coherence: T1 y T2 de (control, objetivo); None omite la decoherencia
        zeta_static: ZZ usado cuando los coeficientes no traen término ZZ (GHz)

    Returns:
        Fidelidad promedio y error frente al ZX90 ideal
    """
    flip = ptm_of_unitary(pauli_string('XI'))
    zz_rate = (plus.beta('ZZ') + minus.beta('ZZ')) / 2
    if plus.beta('ZZ') == 0 and minus.beta('ZZ') == 0:
        zz_rate = zeta_static

    stages = [
        unitary_channel(cr_segment_hamiltonian(plus), tau),
        flip,
        unitary_channel(cr_segment_hamiltonian(minus), tau),
        flip,
        unitary_channel(zz_rate * pauli_string('ZZ') / 4, gate_length),
    ]
    if coherence is not None:
        stages.append(two_qubit_decoherence(coherence, gate_length))

    sign = plus.beta('ZX') if plus.beta('ZX') != 0 else 1.0
    fidelity = average_gate_fidelity(compose(*stages), ptm_of_unitary(zx90_unitary(sign)))
    fidelity = min(max(fidelity, 0.0), 1.0)
    return GateError(fidelity=fidelity, error=1 - fidelity)


def coherence_limited_error(coherence: Tuple[CoherenceTimes, CoherenceTimes], gate_length: float) -> GateError:
    """Error debido sólo a la decoherencia durante `gate_length` (ns)"""
    fidelity = average_gate_fidelity(two_qubit_decoherence(coherence, gate_length), identity_channel(2))
    return GateError(fidelity=fidelity, error=1 - fidelity)


# ==================== Desfase por flujo ====================

def flux_dephasing_rate(
    D_phi: float,
    model: Optional[DephasingModel] = None,
    form: str = 'linear',
    t: Optional[float] = None,
) -> float:
    """
    Tasa de desfase puro por ruido de flujo.

    Args:
        D_phi: Sensibilidad |∂ω01/∂Φ| en GHz/Φ0
        model: Constantes del modelo
        form: `linear` o `sqrt-log`
        t: Tiempo de medición (μs), requerido por `sqrt-log`

    Returns:
        Γφ en μs⁻¹

    Raises:
        DomainError: Si ω_ir·t ≥ 1 en la forma `sqrt-log`
    """
    model = model or DephasingModel()
    if D_phi < 0:
        raise ConfigError(f"D_phi debe ser no negativo: {D_phi}")
    if form == 'linear':
        return model.slope * D_phi + model.offset
    if form != 'sqrt-log':
        raise ConfigError(f"forma de desfase desconocida: {form}")
    if t is None or t <= 0:
        raise ConfigError('la forma sqrt-log requiere un tiempo positivo')
    if model.omega_ir * t >= 1:
        logger.error(f"omega_ir*t = {model.omega_ir * t:.3g} outside the sqrt-log domain")
        raise DomainError(f"ω_ir·t = {model.omega_ir * t:.3g} debe ser menor que 1")
    # D_phi en GHz/Φ0 pasa a μs⁻¹/Φ0
    return 2 * math.pi * D_phi * 1e3 * math.sqrt(model.A_phi * abs(math.log(model.omega_ir * t)))


def csfq_t2(T1: float, gamma_phi: float) -> float:
    """T2 (μs) con 1/T2 = 1/(2T1) + Γφ"""
    rate = 1 / (2 * T1) + gamma_phi
    return math.inf if rate == 0 else 1 / rate


def _flux_path(control: str) -> str:
    return f"subsystems.{control}.params.f"


def control_t2(
    device: DeviceSpec,
    control: str,
    T1: float,
    model: Optional[DephasingModel] = None,
) -> float:
    """T2 del control a partir de la pendiente de su ω01 respecto del flujo"""
    spec = device.subsystem(control)
    if not hasattr(spec.params, 'f'):
        raise ConfigError(f"el subsistema '{control}' no es sintonizable por flujo")

    def omega01(f: float) -> float:
        return subsystem_ladder(with_parameter(device, _flux_path(control), f).subsystem(control)).omega01

    D_phi = abs(flux_derivative(omega01, spec.params.f))
    return csfq_t2(T1, flux_dephasing_rate(D_phi, model))


def gate_error_flux_scan(
    device: DeviceSpec,
    drive: DriveSpec,
    gate_length: float,
    fluxes: Sequence[float],
    coherence: Optional[Tuple[CoherenceTimes, CoherenceTimes]] = None,
    dephasing: Optional[DephasingModel] = None,
    crosstalk: bool = True,
    convention: str = 'square',
    jobs: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Error del ZX90 eco en función del flujo del control.

    En cada flujo se calibra Ω para la duración dada, se escala la diafonía,
    se cancelan IX/IY con un tono activo a ±Ω y se obtiene T2 del control
    desde el modelo de desfase.

    Args:
        device: Dispositivo con un control sintonizable por flujo
        drive: Excitación base (ids, fases)
        gate_length: Duración total del gate (ns)
        fluxes: Flujos del control (Φ0)
        coherence: T1/T2 de (control, objetivo); el T2 del control se recalcula
        dephasing: Modelo de desfase del control
        crosstalk: Si se usa la escala empírica de diafonía
        convention: Convención de la duración total
        jobs: Hilos de trabajo

    Returns:
        Filas (f, t_g, Omega, R, T2, fidelity, error, beta_ZZ) en el orden de `fluxes`
    """
    control = drive.control
    target = resolve_target(device, drive)
    tau = segment_length(gate_length, convention)
    if tau <= 0:
        raise ConfigError(f"la duración {gate_length} ns no deja tiempo para los segmentos CR")

    def evaluate(f: float) -> Dict[str, Any]:
        dev = with_parameter(device, _flux_path(control), float(f))
        R = crosstalk_scale(f, 2 * tau * 1e-3) if crosstalk else drive.R
        base = drive.model_copy(update={'R': R, 'target': target})
        row: Dict[str, Any] = {'f': float(f), 't_g': gate_length, 'R': R}

        try:
            calibration = calibrate_zx90(dev, base, tau, convention=convention, include_single=False)
        except InfeasibleGateLengthError as e:
            logger.warning(f"Flux {f:.5f}: {e}")
            return {**row, 'Omega': math.nan, 'T2': math.nan, 'fidelity': math.nan,
                    'error': math.nan, 'beta_ZZ': math.nan}

        segments = []
        for phase in (0.0, math.pi):
            segment = base.model_copy(update={'Omega': calibration.Omega, 'phi0': base.phi0 + phase})
            tone = active_cancellation(dev, segment)
            segments.append(cr_pauli_coefficients(dev, segment.model_copy(update={'A': tone.A, 'phiA': tone.phi})))

        times = None
        T2 = math.nan
        if coherence is not None:
            T2 = control_t2(dev, control, coherence[0].T1, dephasing)
            times = (CoherenceTimes(T1=coherence[0].T1, T2=T2), coherence[1])

        result = echoed_cr_error(segments[0], segments[1], tau, gate_length, times)
        return {
            **row,
            'Omega': calibration.Omega,
            'T2': T2,
            'fidelity': result.fidelity,
            'error': result.error,
            'beta_ZZ': (segments[0].beta('ZZ') + segments[1].beta('ZZ')) / 2,
        }

    rows = parallel_map(evaluate, list(fluxes), jobs=jobs, desc='flux')
    logger.info(f"Gate error scan finished with {len(rows)} flux points at t_g={gate_length} ns")
    return rows


def ideal_cancellation(coeffs: CRCoefficients) -> CRCoefficients:
    """Coeficientes tras cancelar todo salvo ZX, ZY y ZZ"""
    betas = {label: coeffs.beta(label) for label in ('ZX', 'ZY', 'ZZ')}
    return CRCoefficients.from_betas(betas, Omega=coeffs.Omega, omega_d=coeffs.omega_d, flagged=coeffs.flagged)


def gate_error_length_scan(
    device: DeviceSpec,
    drive: DriveSpec,
    gate_lengths: Sequence[float],
    coherence: Optional[Tuple[CoherenceTimes, CoherenceTimes]] = None,
    convention: str = 'square',
    jobs: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Error del ZX90 eco en función de la duración del gate.

    Para cada t_g se calibra Ω con τ = (t_g − bordes)/2 y se suponen
    cancelados todos los términos salvo ZX, ZY y ZZ, de modo que el error
    sin decoherencia proviene sólo del ZZ total.

    Args:
        device: Dispositivo
        drive: Excitación base
        gate_lengths: Duraciones totales (ns)
        coherence: T1/T2 de (control, objetivo); None omite la decoherencia
        convention: Convención de la duración total
        jobs: Hilos de trabajo

    Returns:
        Filas (t_g, tau, Omega, beta_ZX, beta_ZZ, fidelity, error, coherence_error)
    """
    target = resolve_target(device, drive)
    base = drive.model_copy(update={'target': target})

    def evaluate(gate_length: float) -> Dict[str, Any]:
        tau = segment_length(gate_length, convention)
        row: Dict[str, Any] = {'t_g': float(gate_length), 'tau': tau}
        limit = coherence_limited_error(coherence, gate_length).error if coherence is not None else 0.0
        failed = {**row, 'Omega': math.nan, 'beta_ZX': math.nan, 'beta_ZZ': math.nan,
                  'fidelity': math.nan, 'error': math.nan, 'coherence_error': limit}
        if tau <= 0:
            logger.warning(f"Gate length {gate_length} ns leaves no time for the CR segments")
            return failed

        try:
            calibration = calibrate_zx90(device, base, tau, convention=convention, include_single=False)
        except InfeasibleGateLengthError as e:
            logger.warning(f"t_g={gate_length:.1f} ns: {e}")
            return failed

        segments = [
            ideal_cancellation(cr_pauli_coefficients(
                device, base.model_copy(update={'Omega': calibration.Omega, 'phi0': base.phi0 + phase})
            ))
            for phase in (0.0, math.pi)
        ]
        result = echoed_cr_error(segments[0], segments[1], tau, gate_length, coherence)
        return {
            **row,
            'Omega': calibration.Omega,
            'beta_ZX': segments[0].beta('ZX'),
            'beta_ZZ': (segments[0].beta('ZZ') + segments[1].beta('ZZ')) / 2,
            'fidelity': result.fidelity,
            'error': result.error,
            'coherence_error': limit,
        }

    rows = parallel_map(evaluate, list(gate_lengths), jobs=jobs, desc='t_g')
    logger.info(f"Gate error scan finished with {len(rows)} gate lengths")
    return rows


# ==================== Gate CZ ====================

def omega1_of_f(f: float) -> float:
    """Frecuencia (GHz) del transmon asimétrico en función del flujo"""
    return 6.51262 - 6.7 * f ** 2 + 3.5 * f ** 3 + 8.1 * f ** 4


def delta1_of_f(f: float) -> float:
    """Anarmonicidad (GHz) del transmon asimétrico en función del flujo"""
    return -0.385807 - 0.0635 * f ** 2 + 0.124 * f ** 4


def f_of_omega1(omega: float) -> float:
    """
    Inversa de `omega1_of_f` sobre el tramo monótono f ∈ [0, 0.5].

    Raises:
        DomainError: Si ω está fuera del rango cubierto
    """
    low, high = CZ_FLUX_RANGE
    top, bottom = omega1_of_f(low), omega1_of_f(high)
    if not bottom <= omega <= top:
        raise DomainError(f"ω1 = {omega} GHz fuera de [{bottom:.5f}, {top:.5f}]")
    if omega == top:
        return low
    return float(brentq(lambda f: omega1_of_f(f) - omega, low, high, xtol=1e-12))


def zz_of_omega1(omega: float) -> float:
    """ZZ (GHz) del dispositivo CZ en función de ω1; polo en 5.7 GHz"""
    return (1 / (0.73 * (omega - ZZ_POLE)) + 1.75 * (omega - 5.75) ** 2 - 2.92) * 1e-3


def tanh_flux_pulse(t: Any, gate_length: float, f0: float, f_end: float, x: float) -> Any:
    """
    Pulso de flujo simétrico con subida y bajada en tanh.

    f(t) = [f0 + tanh(x·s·t)·Δf]·[sgn(1/s − t) + 1]/2
         + [f0 + tanh(x·s·(2/s − t))·Δf]·[sgn(t − 1/s) + 1]/2,  s = 1/(2t_g)
    """
    t = np.asarray(t, dtype=float)
    s = 1 / (2 * gate_length)
    step = f_end - f0
    rise = (f0 + np.tanh(x * s * t) * step) * (np.sign(1 / s - t) + 1) / 2
    fall = (f0 + np.tanh(x * s * (2 / s - t)) * step) * (np.sign(t - 1 / s) + 1) / 2
    return rise + fall


def square_flux_pulse(t: Any, gate_length: float, f0: float, f_end: float, x: float = 0.0) -> Any:
    """Pulso cuadrado: f_end durante todo el gate"""
    return np.full_like(np.asarray(t, dtype=float), f_end)


FLUX_PULSES = {'tanh': tanh_flux_pulse, 'square': square_flux_pulse}


def cz_phase_gate_length(
    f0: float,
    f_end: float,
    x: float,
    phase: float = 0.5,
    omega_of_f: Callable[[float], float] = omega1_of_f,
    zz_of_omega: Callable[[float], float] = zz_of_omega1,
    pole: Optional[float] = ZZ_POLE,
    t_max: float = 5000.0,
    tol: float = 0.1,
    shape: str = 'tanh',
) -> float:
    """
    Duración del gate CZ: t_g tal que ∫₀^t_g α_ZZ(t) dt = phase.

    Args:
        f0: Flujo de reposo (Φ0)
        f_end: Flujo de operación (Φ0)
        x: Pendiente del pulso tanh
        phase: Fase condicional en ciclos (0.5 equivale a π)
        omega_of_f: Frecuencia del qubit sintonizable en función del flujo
        zz_of_omega: ZZ (GHz) en función de esa frecuencia
        pole: Frecuencia (GHz) bajo la cual el ajuste ZZ deja de ser válido; None la omite
        t_max: Duración máxima explorada (ns)
        tol: Tolerancia en t_g (ns)
        shape: Forma del pulso de flujo, `tanh` o `square`

    Returns:
        t_g en ns

    Raises:
        RejectedPathError: Si la trayectoria de ω cruza el polo del ajuste ZZ
        NoFiniteSolutionError: Si la fase no se alcanza antes de `t_max`
    """
    if shape not in FLUX_PULSES:
        raise ConfigError(f"forma de pulso desconocida: {shape}")
    if shape == 'tanh' and x <= 0:
        raise ConfigError(f"x debe ser positivo: {x}")
    pulse = FLUX_PULSES[shape]

    samples = np.linspace(min(f0, f_end), max(f0, f_end), 201)
    path = np.array([omega_of_f(f) for f in samples])
    if pole is not None and np.any(path <= pole):
        logger.error(f"Flux path reaches omega1={path.min():.4f} GHz, below the ZZ fit pole")
        raise RejectedPathError(f"la trayectoria alcanza ω1 = {path.min():.4f} GHz, bajo el polo en {pole} GHz")
    if not np.all(np.isfinite([zz_of_omega(w) for w in path])):
        raise RejectedPathError('el ajuste ZZ no es finito sobre la trayectoria')

    def accumulated(gate_length: float) -> float:
        value, _ = quad(
            lambda t: zz_of_omega(omega_of_f(float(pulse(t, gate_length, f0, f_end, x)))),
            0.0, gate_length, limit=200,
        )
        return value - phase

    if accumulated(t_max) < 0:
        raise NoFiniteSolutionError(f"la fase {phase} no se acumula antes de {t_max} ns")
    gate_length = float(brentq(accumulated, tol, t_max, xtol=tol))
    logger.info(f"CZ gate length {gate_length:.1f} ns for f0={f0}, f_end={f_end}, x={x}")
    return gate_length


def degenerate_gap(
    H: HamiltonianMatrix,
    pair: Tuple[Tuple[int, ...], Tuple[int, ...]],
    window: float = 0.05,
) -> DegenerateGap:
    """
    Separación de dos estados casi degenerados por teoría de perturbaciones
    de segundo orden en el subespacio degenerado.

    H_eff(E) = H0_QQ + V_QQ + V_QP·(E − H0_P)⁻¹·V_PQ, con E autoconsistente
    tras una iteración de punto fijo.

    Args:
        H: Hamiltoniano estático en la base desnuda
        pair: Etiquetas de los dos estados
        window: Distancia (GHz) bajo la cual otro estado desnudo se considera casi degenerado

    Returns:
        Separación de autovalores y acoplamiento efectivo en GHz; marcado si
        otro estado está dentro de `window`
    """
    Q = [label_index(H, label) for label in pair]
    P = [k for k in range(H.dim) if k not in Q]
    H0 = np.real(np.diag(H.matrix))
    V = H.matrix - np.diag(H0)
    V_QP = V[np.ix_(Q, P)]
    V_PQ = V[np.ix_(P, Q)]
    H_QQ = np.diag(H0[Q]) + V[np.ix_(Q, Q)]

    def effective(E: float) -> np.ndarray:
        denominators = E - H0[P]
        if np.any(np.abs(denominators) < 1e-9):
            raise PoleProximityError(f"un estado intermedio es degenerado con E = {E:.6g} GHz")
        return H_QQ + V_QP @ np.diag(1 / denominators) @ V_PQ

    E = float(np.mean(H0[Q]))
    E = float(np.mean(np.linalg.eigvalsh(effective(E))))
    H_eff = effective(E)
    values = np.linalg.eigvalsh(H_eff)

    flagged = bool(np.any(np.abs(H0[P] - E) < window))
    if flagged:
        logger.warning(f"Another bare state lies within {window} GHz of {pair}; prefer exact diagonalization")
    return DegenerateGap(gap=float(values[1] - values[0]), coupling=float(abs(H_eff[0, 1])), flagged=flagged)


def cz_gap_scan(
    device: DeviceSpec,
    qubit: str,
    omegas: Sequence[float],
    pair: Tuple[Tuple[int, ...], Tuple[int, ...]] = ((1, 0, 1), (0, 2, 0)),
    jobs: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """
    Brecha entre dos estados al sintonizar ω1, con δ1 siguiendo el ajuste del
    transmon asimétrico.

    Args:
        device: Dispositivo cuyo qubit `qubit` es una escalera explícita (omega, delta)
        qubit: Id del qubit sintonizable
        omegas: Frecuencias ω1 (GHz)
        pair: Etiquetas de los dos estados
        jobs: Hilos de trabajo

    Returns:
        Filas (omega1, f, delta1, gap, coupling, zeta_fit, flagged)
    """
    def evaluate(omega: float) -> Dict[str, Any]:
        f = f_of_omega1(float(omega))
        delta = delta1_of_f(f)
        dev = with_parameter(device, f"subsystems.{qubit}.params.omega", float(omega))
        dev = with_parameter(dev, f"subsystems.{qubit}.params.delta", delta)
        result = degenerate_gap(build_static(dev), pair)
        return {
            'omega1': float(omega),
            'f': f,
            'delta1': delta,
            'gap': result.gap,
            'coupling': result.coupling,
            'zeta_fit': zz_of_omega1(float(omega)),
            'flagged': result.flagged,
        }

    return parallel_map(evaluate, list(omegas), jobs=jobs, desc='omega1')


def _fit_delta(omega: float) -> float:
    """δ1 del ajuste; fuera del tramo sintonizable se congela en el borde"""
    low, high = CZ_FLUX_RANGE
    bottom, top = omega1_of_f(high), omega1_of_f(low)
    return delta1_of_f(f_of_omega1(min(max(omega, bottom), top)))


def cz_minimum_gap(
    device: DeviceSpec,
    qubit: str,
    pair: Tuple[Tuple[int, ...], Tuple[int, ...]] = ((1, 0, 1), (0, 2, 0)),
    half_width: float = 0.2,
    points: int = 41,
) -> Dict[str, Any]:
    """
    Brecha mínima del par en su anticruce, buscada alrededor del cruce desnudo.

    El cruce puede quedar fuera del tramo sintonizable del transmon; ahí δ1 se
    mantiene en el valor del borde del ajuste. La búsqueda es una rejilla de
    `points` puntos en ±`half_width` seguida de un refinamiento acotado.

    Args:
        device: Dispositivo cuyo qubit `qubit` es una escalera explícita (omega, delta)
        qubit: Id del qubit sintonizable
        pair: Etiquetas de los dos estados
        half_width: Semiancho (GHz) de la ventana de búsqueda
        points: Puntos de la rejilla inicial

    Returns:
        omega1, gap, coupling y flagged en el mínimo

    Raises:
        ConfigError: Si el par no cambia con la frecuencia del qubit
    """
    q = device.index(qubit)
    slope = pair[0][q] - pair[1][q]
    if slope == 0:
        raise ConfigError(f"el par {pair} no depende de la frecuencia de {qubit}")

    def tuned(omega: float) -> DeviceSpec:
        dev = with_parameter(device, f"subsystems.{qubit}.params.omega", float(omega))
        return with_parameter(dev, f"subsystems.{qubit}.params.delta", _fit_delta(float(omega)))

    def gap_at(omega: float) -> DegenerateGap:
        return degenerate_gap(build_static(tuned(omega)), pair)

    reference = device.subsystem(qubit).params.omega
    H = build_static(tuned(reference))
    bare = np.real(np.diag(H.matrix))
    detuning = bare[label_index(H, pair[0])] - bare[label_index(H, pair[1])]
    crossing = reference - detuning / slope

    grid = np.linspace(crossing - half_width, crossing + half_width, points)
    gaps = [gap_at(omega).gap for omega in grid]
    k = int(np.argmin(gaps))
    bounds = (grid[max(k - 1, 0)], grid[min(k + 1, points - 1)])
    best = minimize_scalar(lambda omega: gap_at(omega).gap, bounds=bounds, method='bounded', options={'xatol': 1e-5})

    omega = float(best.x)
    result = gap_at(omega)
    logger.info(f"Minimum {pair[0]}-{pair[1]} gap {result.gap * 1e3:.2f} MHz at omega1={omega:.4f} GHz")
    return {'omega1': omega, 'gap': result.gap, 'coupling': result.coupling, 'flagged': result.flagged}
