"""
Dinámica de resonancia cruzada: coeficientes de Pauli bajo excitación, factor
dinámico η, amplitud de cancelación Ω*, tasa del CR eco, cancelación activa y
calibración del ZX90.
"""
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, least_squares

from ..hamiltonian.models import DeviceSpec, DriveSpec, HamiltonianMatrix, SubsystemKind
from ..hamiltonian.services import (
    build_cancellation,
    build_drive,
    build_static,
    computational_labels,
    resolve_target,
    rotating_frame_rwa,
)
from ..shared.errors import ConfigError, DegenerateAssignmentError, InfeasibleGateLengthError
from ..shared.logger import get_logger
from ..shared.operators import annihilation, basis_labels, embed
from ..shared.parallel import parallel_map
from ..statics.services import static_zz_sw
from ..transforms.services import (
    dressed_transform,
    effective_hamiltonian,
    least_action_blockdiag,
    pauli_decompose,
    sw_effective,
)
from .models import (
    CR_TERMS,
    ActiveCancellation,
    Calibration,
    CancellationReport,
    CRCoefficients,
    CRFrame,
    EtaParams,
    EtaReport,
    SlopeFit,
)

logger = get_logger(__name__)

OMEGA_MAX = 0.2
OMEGA_STAR_MAX = 0.15
OMEGA_STEP = 0.001
ETA_POLE_MARGIN = 0.01
EDGE_TIME = {'square': 80.0, 'gaussian': 160.0}


# ==================== Coeficientes CR ====================

def resolve_cr_model(device: DeviceSpec, drive: DriveSpec) -> str:
    """`effective` o `circuit` según `drive.model`; `auto` elige el efectivo si todos los acopladores son buses"""
    if drive.model != 'auto':
        return drive.model
    couplers = device.coupler_ids()
    if couplers and all(device.subsystem(c).kind == SubsystemKind.RESONATOR for c in couplers):
        return 'effective'
    return 'circuit'


def _effective_operators(
    device: DeviceSpec,
    unit: DriveSpec,
) -> Tuple[HamiltonianMatrix, List[np.ndarray], List[Tuple[int, ...]]]:
    H = effective_hamiltonian(sw_effective(device), device.qubit_ids())

    def quadrature(subsystem_id: str) -> np.ndarray:
        if subsystem_id not in H.ids:
            raise ConfigError(f"drives: '{subsystem_id}' no es un qubit del modelo efectivo")
        index = H.ids.index(subsystem_id)
        a = embed(annihilation(H.dims[index]), index, list(H.dims))
        return a + a.conj().T

    ops = [
        quadrature(unit.control),
        quadrature(unit.crosstalk_target or unit.target),
        quadrature(unit.target),
    ]
    labels = []
    for bits in basis_labels([2, 2]):
        occupation = dict(zip([unit.control, unit.target], bits))
        labels.append(tuple(occupation[q] for q in H.ids))
    return H, ops, labels


def _circuit_operators(
    device: DeviceSpec,
    unit: DriveSpec,
) -> Tuple[HamiltonianMatrix, List[np.ndarray], List[Tuple[int, ...]]]:
    H = build_static(device)
    control_op, crosstalk_op = build_drive(device, unit)
    ops = [control_op, crosstalk_op, build_cancellation(device, unit)]
    return H, ops, computational_labels(device, [unit.control, unit.target])


def prepare_cr_frame(device: DeviceSpec, drive: DriveSpec) -> CRFrame:
    """
    Lleva el Hamiltoniano estático y las cuadraturas de excitación a la base vestida.

    Con el modelo efectivo el bus se elimina antes de excitar y el análisis
    corre sobre los dos qubits con J_{n1n2} dependiente del estado; con el
    modelo de circuito se usa el Hamiltoniano completo.

    Args:
        device: Dispositivo
        drive: Excitación (sólo se usan los ids y `model`)

    Returns:
        Marco reutilizable para cualquier amplitud y fase
    """
    target = resolve_target(device, drive)
    unit = drive.model_copy(update={'Omega': 1.0, 'R': 1.0, 'A': 1.0, 'target': target})
    model = resolve_cr_model(device, drive)
    build = _effective_operators if model == 'effective' else _circuit_operators
    H_static, ops, labels = build(device, unit)
    frame = dressed_transform(H_static)

    computational = [H_static.index_of(label) for label in labels]
    omega_target = frame.energies[computational[1]] - frame.energies[computational[0]]
    logger.debug(f"CR frame prepared with the {model} model (dimension {H_static.dim})")

    return CRFrame(
        H_dressed=H_static.with_matrix(np.diag(frame.energies).astype(complex)),
        control_quadrature=frame.to_dressed(ops[0]),
        crosstalk_quadrature=frame.to_dressed(ops[1]),
        target_quadrature=frame.to_dressed(ops[2]),
        computational=tuple(computational),
        omega_target=float(omega_target),
    )


def coefficients_in_frame(frame: CRFrame, drive: DriveSpec) -> CRCoefficients:
    """
    Coeficientes CR para una excitación sobre un marco ya preparado.

    Se rota al marco de la excitación, se separa el subespacio computacional
    por mínima acción y luego se separan los bloques del control en 0 y 1.
    """
    omega_d = frame.omega_target if drive.omega_d is None else drive.omega_d
    ops = [
        drive.Omega * frame.control_quadrature,
        drive.R * drive.Omega * frame.crosstalk_quadrature,
        drive.A * frame.target_quadrature,
    ]
    H_rot = rotating_frame_rwa(frame.H_dressed, ops, drive, omega_d=omega_d)

    computational = list(frame.computational)
    inside = set(computational)
    rest = [k for k in range(H_rot.dim) if k not in inside]
    first = least_action_blockdiag(H_rot.matrix, [computational, rest])
    second = least_action_blockdiag(first.block(0), [[0, 1], [2, 3]])

    flagged = first.flagged or second.flagged
    if flagged:
        logger.warning(f"Computational block poorly separated at Omega={drive.Omega:.4g}")

    return CRCoefficients(
        pauli=pauli_decompose(second.H_BD),
        Omega=drive.Omega,
        omega_d=omega_d,
        flagged=flagged,
    )


def cr_pauli_coefficients(device: DeviceSpec, drive: DriveSpec) -> CRCoefficients:
    """
    Hamiltoniano CR efectivo en el subespacio computacional.

    Args:
        device: Dispositivo
        drive: Excitación; sin `omega_d` se usa la frecuencia vestida del objetivo

    Returns:
        Coeficientes β en GHz
    """
    return coefficients_in_frame(prepare_cr_frame(device, drive), drive)


def _coefficient_row(coeffs: CRCoefficients) -> Dict[str, Any]:
    row: Dict[str, Any] = {'Omega': coeffs.Omega}
    row.update({f"beta_{label}": coeffs.beta(label) for label in CR_TERMS})
    row['flagged'] = coeffs.flagged
    return row


def _flagged_row(omega: float) -> Dict[str, Any]:
    row: Dict[str, Any] = {'Omega': omega}
    row.update({f"beta_{label}": math.nan for label in CR_TERMS})
    row['flagged'] = True
    return row


def cr_coefficient_sweep(
    device: DeviceSpec,
    drive: DriveSpec,
    omegas: Sequence[float],
    jobs: Optional[int] = None,
) -> List[Dict[str, Any]]:
    """Filas (Ω, β_P…) en el orden de `omegas`; los puntos sin descomposición quedan en NaN y marcados"""
    frame = prepare_cr_frame(device, drive)

    def evaluate(omega: float) -> Dict[str, Any]:
        try:
            return _coefficient_row(coefficients_in_frame(frame, drive.model_copy(update={'Omega': float(omega)})))
        except DegenerateAssignmentError as e:
            logger.warning(f"Skipping Omega={omega:.4g}: {e}")
            return _flagged_row(float(omega))

    rows = parallel_map(evaluate, list(omegas), jobs=jobs, desc='Omega')
    logger.info(f"CR coefficient sweep finished with {len(rows)} points")
    return rows


def echoed_cr_rate(coeffs: CRCoefficients, include_single: bool = True) -> float:
    """
    Frecuencia de oscilación del CR eco.

    f = √((βZX+βIX)² + (βZY+βIY)² + (βZZ/2)²) + √((βZX−βIX)² + (βZY−βIY)² + (βZZ/2)²)

    Con `include_single=False` se ignoran β_IX y β_IY, como cuando un tono
    activo los cancela.
    """
    b = dict(coeffs.betas)
    if not include_single:
        b['IX'] = b['IY'] = 0.0
    zz = b['ZZ'] / 2
    return (
        math.sqrt((b['ZX'] + b['IX']) ** 2 + (b['ZY'] + b['IY']) ** 2 + zz ** 2)
        + math.sqrt((b['ZX'] - b['IX']) ** 2 + (b['ZY'] - b['IY']) ** 2 + zz ** 2)
    )


# ==================== Ajustes ====================

def fit_pauli_slopes(rows: List[Dict[str, Any]], K: Optional[float] = None) -> SlopeFit:
    """
    Ajusta β_ZX(Ω) = BΩ + CΩ³ y β_IX(Ω) = DΩ + EΩ³ por mínimos cuadrados.

    Args:
        rows: Filas de `cr_coefficient_sweep` con φ0 = 0
        K: Pendiente IX por unidad de excitación directa del objetivo

    Returns:
        Coeficientes B, C, D, E (y K si se proporcionó)
    """
    rows = [row for row in rows if math.isfinite(row['beta_ZX'])]
    omega = np.array([row['Omega'] for row in rows])
    design = np.column_stack([omega, omega ** 3])
    (B, C), *_ = np.linalg.lstsq(design, np.array([row['beta_ZX'] for row in rows]), rcond=None)
    (D, E), *_ = np.linalg.lstsq(design, np.array([row['beta_IX'] for row in rows]), rcond=None)
    return SlopeFit(B=float(B), C=float(C), D=float(D), E=float(E), K=K)


def target_drive_slope(device: DeviceSpec, drive: DriveSpec, amplitude: float = 1e-3) -> float:
    """K: β_IX por unidad de amplitud de una excitación directa del objetivo"""
    probe = drive.model_copy(update={'Omega': 0.0, 'A': amplitude, 'phiA': 0.0})
    return cr_pauli_coefficients(device, probe).beta('IX') / amplitude


def eta_numerical(device: DeviceSpec, drive: DriveSpec, omega_max: float = 0.01, points: int = 11) -> float:
    """
    Coeficiente c del ajuste β_ZZ(Ω) − β_ZZ(0) = c·Ω² sobre Ω ∈ [0, omega_max].

    Returns:
        c en 1/GHz
    """
    rows = cr_coefficient_sweep(device, drive, np.linspace(0.0, omega_max, points), jobs=1)
    omega = np.array([row['Omega'] for row in rows])
    shift = np.array([row['beta_ZZ'] for row in rows]) - rows[0]['beta_ZZ']
    (c,), *_ = np.linalg.lstsq((omega ** 2)[:, None], shift, rcond=None)
    return float(c)


# ==================== η y Ω* ====================

def eta_terms(r: float, gamma: float) -> List[float]:
    """Coeficientes A0..A6(r, γ) de la serie de η"""
    g = gamma
    return [
        2 * r ** 3 * (r + 2 * g + g ** 2),
        r ** 2 * (1 + 4 * r ** 2 - 16 * g - 6 * g ** 2 + 2 * r * (2 * g ** 2 + 4 * g - 5)),
        r * (r ** 3 + 22 * g - 2 + r * (19 - 32 * g - 12 * g ** 2) + 2 * r ** 2 * (g ** 2 + 2 * g - 10)),
        1 - 5 * r ** 3 - 10 * g + 9 * g ** 2 + r * (44 * g - 15) - 2 * r ** 2 * (3 * g ** 2 + 8 * g - 18),
        4 + 9 * r ** 2 - 20 * g + 18 * g ** 2 + r * (22 * g - 27),
        7 - 7 * r - 10 * g + 9 * g ** 2,
        2.0,
    ]


def eta_params(device: DeviceSpec) -> EtaParams:
    """Parámetros de η desde el modelo efectivo SW del dispositivo"""
    eff = sw_effective(device)
    return EtaParams(
        delta=eff.detuning,
        delta1=eff.delta1_bar,
        delta2=eff.delta2_bar,
        J01=eff.j(0, 1),
        J10=eff.j(1, 0),
    )


def dynamical_eta(p: EtaParams) -> EtaReport:
    """
    Factor cuadrático dinámico η del ZZ bajo excitación CR: α_ZZ = ζ + η·Ω².

    η = J01²/(2Δ²δ2(Δ+δ2)²(Δ−rδ2)³(2Δ−rδ2))·Σ A_i·Δ^i·δ2^(6−i), con r = δ1/δ2
    y γ = J10/J01. Los polos están en Δ ∈ {−δ2, 0, δ1/2, δ1}.

    Args:
        p: Δ, δ1, δ2, J01 y J10 en GHz

    Returns:
        η en 1/GHz, marcado si Δ está a menos de 10 MHz de un polo
    """
    if p.J01 == 0 or p.delta2 == 0:
        raise ConfigError('η requiere J01 ≠ 0 y δ2 ≠ 0')
    r = p.delta1 / p.delta2
    gamma = p.J10 / p.J01
    d, d2 = p.delta, p.delta2

    poles = [-d2, 0.0, p.delta1 / 2, p.delta1]
    flagged = min(abs(d - pole) for pole in poles) < ETA_POLE_MARGIN
    if flagged:
        logger.warning(f"eta evaluated within {ETA_POLE_MARGIN} GHz of a pole at Delta={d:.4g}")

    terms = eta_terms(r, gamma)
    series = sum(a * d ** i * d2 ** (6 - i) for i, a in enumerate(terms))
    denominator = 2 * d ** 2 * d2 * (d + d2) ** 2 * (d - r * d2) ** 3 * (2 * d - r * d2)
    eta = p.J01 ** 2 * series / denominator if denominator != 0 else math.inf
    return EtaReport(eta=eta, r=r, gamma=gamma, terms=tuple(terms), flagged=flagged)


def closed_form_omega_star(r: float, gamma: float, delta: float, delta2: float) -> Optional[float]:
    """
    Ω* = |Δ|·√(2(r+γ²)/(r+γ(2+γ)))·√(1 − C·Δ/δ2), válido para Δ/δ2 ≪ 1.

    Returns:
        Ω* en GHz, o None si algún radicando es negativo
    """
    g = gamma
    denominator = (r + g ** 2) * (r + g * (2 + g))
    C = (0.5 + 2 * g + g ** 2 + r ** 2 + r * g * (2 + g) + g ** 2 * (1 + 2 * g ** 2) / (2 * r)) / denominator
    first = 2 * (r + g ** 2) / (r + g * (2 + g))
    second = 1 - C * delta / delta2
    if first < 0 or second < 0:
        return None
    return abs(delta) * math.sqrt(first) * math.sqrt(second)


def _omega_star_la(device: DeviceSpec, drive: DriveSpec) -> Optional[float]:
    """
    Primera raíz de β_ZZ(Ω) en (0, OMEGA_STAR_MAX] sobre una grilla de 1 MHz refinada con Brent.

    Los puntos donde la descomposición por bloques falla se saltan; el cambio
    de signo se busca entre los puntos válidos vecinos.
    """
    frame = prepare_cr_frame(device, drive)

    def zz(omega: float) -> float:
        return coefficients_in_frame(frame, drive.model_copy(update={'Omega': float(omega)})).beta('ZZ')

    grid = np.arange(1, int(round(OMEGA_STAR_MAX / OMEGA_STEP)) + 1) * OMEGA_STEP
    previous_omega, previous = 0.0, zz(0.0)
    skipped = 0
    for omega in grid:
        try:
            current = zz(omega)
        except DegenerateAssignmentError as e:
            logger.warning(f"Skipping Omega={omega:.4g} in the cancellation scan: {e}")
            skipped += 1
            continue
        if current == 0:
            return float(omega)
        if np.sign(current) != np.sign(previous):
            try:
                return float(brentq(zz, previous_omega, omega, xtol=1e-7))
            except DegenerateAssignmentError:
                return float(previous_omega + omega) / 2
        previous_omega, previous = omega, current

    if skipped:
        logger.warning(f"Cancellation scan skipped {skipped} of {len(grid)} points")
    return None


def cancellation_amplitude(device: DeviceSpec, drive: DriveSpec, method: str = 'all') -> CancellationReport:
    """
    Amplitud CR a la que el ZZ total se anula.

    Métodos: `la` (raíz de β_ZZ(Ω) por mínima acción en (0, 150 MHz]),
    `on` (raíz de ζ_SW + η·Ω²), `closed` (fórmula cerrada) o `all`.

    Returns:
        Reporte con None donde no hay cancelación dinámica
    """
    methods = {'la', 'on', 'closed'} if method == 'all' else {method}
    if not methods <= {'la', 'on', 'closed'}:
        raise ConfigError(f"método de cancelación desconocido: {method}")

    result: Dict[str, Optional[float]] = {}
    if 'la' in methods:
        result['omega_star_la'] = _omega_star_la(device, drive)
    if methods & {'on', 'closed'}:
        p = eta_params(device)
        report = dynamical_eta(p)
        if 'on' in methods:
            zeta = static_zz_sw(sw_effective(device))
            ratio = -zeta / report.eta if report.eta not in (0, math.inf) else -1
            result['omega_star_on'] = math.sqrt(ratio) if ratio > 0 else None
        if 'closed' in methods:
            result['omega_star_closed'] = closed_form_omega_star(report.r, report.gamma, p.delta, p.delta2)

    logger.info(f"Cancellation amplitudes: {result}")
    return CancellationReport(**result)


# ==================== Cancelación activa y calibración ====================

def active_cancellation(device: DeviceSpec, drive: DriveSpec, max_iterations: int = 50) -> ActiveCancellation:
    """
    Amplitud y fase del tono sobre el objetivo que anulan β_IX y β_IY.

    La estimación inicial sale de la respuesta lineal de IX e IY al tono y se
    refina con mínimos cuadrados sobre (A·cos φ, A·sin φ).

    Args:
        device: Dispositivo
        drive: Excitación CR con su diafonía
        max_iterations: Evaluaciones máximas del refinamiento

    Returns:
        Tono de cancelación y residuo en GHz
    """
    frame = prepare_cr_frame(device, drive)

    def residual(x: np.ndarray) -> np.ndarray:
        tone = drive.model_copy(update={'A': float(math.hypot(*x)), 'phiA': float(math.atan2(x[1], x[0]))})
        coeffs = coefficients_in_frame(frame, tone)
        return np.array([coeffs.beta('IX'), coeffs.beta('IY')]) * 1e3

    base = residual(np.zeros(2))
    step = max(drive.Omega * drive.R, 1e-4)
    jacobian = np.column_stack([
        (residual(np.array([step, 0.0])) - base) / step,
        (residual(np.array([0.0, step])) - base) / step,
    ])
    try:
        guess = np.linalg.solve(jacobian, -base)
    except np.linalg.LinAlgError:
        guess = np.zeros(2)

    solution = least_squares(residual, guess, max_nfev=max_iterations, xtol=1e-12, ftol=1e-12)
    remaining = float(np.max(np.abs(solution.fun))) * 1e-3
    if not solution.success or remaining > 1e-6:
        logger.warning(f"Active cancellation left a residual of {remaining:.3g} GHz")

    x = solution.x
    return ActiveCancellation(
        A=float(math.hypot(*x)),
        phi=float(math.atan2(x[1], x[0]) % (2 * math.pi)),
        residual=remaining,
        converged=bool(solution.success),
    )


def gate_time(tau: float, convention: str = 'square') -> float:
    """
    Duración total del CR eco: 2τ más los bordes y los pulsos π.

    Args:
        tau: Duración de cada segmento CR (ns)
        convention: `square` (2τ + 80 ns) o `gaussian` (2τ + 160 ns)
    """
    try:
        return 2 * tau + EDGE_TIME[convention]
    except KeyError:
        raise ConfigError(f"convención de duración desconocida: {convention}")


def segment_length(gate_length: float, convention: str = 'square') -> float:
    """τ a partir de la duración total del CR eco"""
    return (gate_length - gate_time(0.0, convention)) / 2


def crosstalk_scale(f: float, tau_total_us: float, a: float = 0.07, b: float = 40.0, p: float = 1.2) -> float:
    """
    Escala empírica de diafonía R = max(0, a − b|f − 0.5|^p)·τ^(2/3).

    Args:
        f: Flujo del control (Φ0)
        tau_total_us: Duración total de la excitación CR (μs)
    """
    return max(0.0, a - b * abs(f - 0.5) ** p) * tau_total_us ** (2 / 3)


def calibrate_zx90(
    device: DeviceSpec,
    drive: DriveSpec,
    tau: float,
    omega_max: float = OMEGA_MAX,
    points: int = 101,
    convention: str = 'square',
    include_single: bool = True,
) -> Calibration:
    """
    Amplitud Ω cuya tasa del CR eco vale 1/(4τ).

    La tasa de `echoed_cr_rate` suma los dos segmentos del eco, así que con
    β_IX = β_IY = β_ZZ = 0 vale 2·β_ZX y la condición f·τ = 1/4 equivale a
    β_ZX·τ = 1/8: cada segmento gira π/4 y el eco completo da ZX(π/2).

    Args:
        device: Dispositivo
        drive: Excitación (fases, diafonía y cancelación)
        tau: Duración de cada segmento CR (ns)
        omega_max: Amplitud máxima explorada (GHz)
        points: Puntos de la grilla previa
        convention: Convención de la duración total
        include_single: Si la tasa incluye β_IX y β_IY

    Returns:
        Amplitud calibrada y duración total del gate

    Raises:
        InfeasibleGateLengthError: Si la tasa máxima alcanzable es menor que la requerida
    """
    if tau <= 0:
        raise ConfigError(f"tau debe ser positivo: {tau}")
    target = 1 / (4 * tau)
    frame = prepare_cr_frame(device, drive)

    def coefficients(omega: float) -> CRCoefficients:
        return coefficients_in_frame(frame, drive.model_copy(update={'Omega': float(omega)}))

    grid = np.linspace(0.0, omega_max, points)
    previous = 0.0
    best_zx = 0.0
    for omega in grid[1:]:
        coeffs = coefficients(omega)
        best_zx = max(best_zx, abs(coeffs.beta('ZX')))
        if echoed_cr_rate(coeffs, include_single) >= target:
            Omega = brentq(lambda x: echoed_cr_rate(coefficients(x), include_single) - target, previous, omega, rtol=1e-8)
            rate = echoed_cr_rate(coefficients(Omega), include_single)
            logger.info(f"Calibrated ZX90: Omega={Omega:.6g} GHz for tau={tau:.4g} ns")
            return Calibration(Omega=float(Omega), tau=tau, rate=rate, gate_length=gate_time(tau, convention))
        previous = omega

    min_length = 1 / (4 * best_zx) + EDGE_TIME[convention] if best_zx > 0 else math.inf
    logger.error(f"Required echoed rate {target:.4g} GHz exceeds the reachable maximum")
    raise InfeasibleGateLengthError(
        f"la tasa requerida {target:.4g} GHz excede la máxima; duración mínima {min_length:.1f} ns",
        min_gate_length=min_length,
    )
