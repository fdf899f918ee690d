"""
Espectros de elementos individuales: transmon, Duffing, CSFQ, transmon
sintonizable y resonador, más las fórmulas de acoplamiento capacitivo.
"""
import math
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np
from scipy.linalg import eigh, eigvalsh_tridiagonal
from scipy.optimize import minimize_scalar

from ..shared.errors import NumericalDomainError, TruncationError
from ..shared.logger import get_logger
from ..shared.operators import annihilation
from .models import (
    CsfqParams,
    DuffingParams,
    LevelLadder,
    ResonatorParams,
    TransmonParams,
    TunableTransmonParams,
)

logger = get_logger(__name__)

CHARGE_CONVERGENCE_TOL = 1e-9
MAX_CUTOFF_DOUBLINGS = 6
XI_GRID_POINTS = 59


def _ladder_from_levels(levels: np.ndarray) -> LevelLadder:
    levels = np.sort(np.asarray(levels, dtype=float))
    return LevelLadder(energies=tuple(float(e) for e in levels - levels[0]))


# ==========================================================================
# Transmon en base de carga
# ==========================================================================

def _charge_levels(EC: float, EJ: float, ng: float, ncut: int, k: int) -> np.ndarray:
    n = np.arange(-ncut, ncut + 1, dtype=float)
    diagonal = 4.0 * EC * (n - ng) ** 2
    off_diagonal = np.full(2 * ncut, -EJ / 2.0)
    return eigvalsh_tridiagonal(diagonal, off_diagonal, select='i', select_range=(0, k - 1))


def transmon_charge_spectrum(p: TransmonParams, k: int) -> LevelLadder:
    """
    Diagonaliza 4EC(n−ng)² − (EJ/2)(|n⟩⟨n+1| + h.c.) en la base de carga.

    El corte se duplica desde `p.ncut` hasta que el nivel más alto pedido se
    mueve menos de 1e-9 GHz.

    Args:
        p: Parámetros del transmon
        k: Número de niveles

    Returns:
        Escalera con los k niveles más bajos y E(0) = 0

    Raises:
        TruncationError: Si el corte no converge tras varias duplicaciones
    """
    ncut = max(p.ncut, k)
    levels = _charge_levels(p.EC, p.EJ, p.ng, ncut, k)
    for _ in range(MAX_CUTOFF_DOUBLINGS):
        refined = _charge_levels(p.EC, p.EJ, p.ng, 2 * ncut, k)
        if abs(refined[-1] - levels[-1]) < CHARGE_CONVERGENCE_TOL:
            return _ladder_from_levels(refined)
        ncut, levels = 2 * ncut, refined

    logger.error(f"Charge basis did not converge for EC={p.EC}, EJ={p.EJ} up to ncut={ncut}")
    raise TruncationError(f"La base de carga no converge hasta ncut={ncut}")


def charge_dispersion(p: TransmonParams) -> float:
    """Dispersión de carga |E01(ng=0.5) − E01(ng=0)| en GHz"""
    at_zero = transmon_charge_spectrum(p.model_copy(update={'ng': 0.0}), 2).omega01
    at_half = transmon_charge_spectrum(p.model_copy(update={'ng': 0.5}), 2).omega01
    return abs(at_half - at_zero)


# ==========================================================================
# Duffing y resonador
# ==========================================================================

def duffing_ladder(p: DuffingParams) -> LevelLadder:
    """E(n) = ω·n + (δ/2)·n(n−1) para n < nlevels"""
    n = np.arange(p.nlevels, dtype=float)
    return LevelLadder(energies=tuple(float(e) for e in p.omega * n + 0.5 * p.delta * n * (n - 1)))


def resonator_ladder(p: ResonatorParams, k: int) -> LevelLadder:
    """Escalera armónica ω_r·n"""
    return LevelLadder(energies=tuple(p.omega_r * n for n in range(k)))


# ==========================================================================
# CSFQ
# ==========================================================================

def csfq_potential_derivative(p: CsfqParams, phi: float, order: int) -> float:
    """
    Derivada de orden `order` de U(φ) = −2EJ cos(φ/2) − αEJ cos(φ − 2πf).
    """
    shift = order * math.pi / 2
    return (-2.0 * p.EJ * 0.5 ** order * math.cos(phi / 2 + shift)
            - p.alpha * p.EJ * math.cos(phi - 2 * math.pi * p.f + shift))


def csfq_potential_minimum(p: CsfqParams) -> float:
    """
    Fase del mínimo del potencial.

    Parte de la aproximación lineal en δf y la refina con minimización acotada.
    """
    guess = -2 * math.pi * p.alpha * (p.f - 0.5) / (0.5 - p.alpha)
    result = minimize_scalar(
        lambda phi: csfq_potential_derivative(p, phi, 0),
        bounds=(guess - math.pi / 2, guess + math.pi / 2),
        method='bounded',
        options={'xatol': 1e-12},
    )
    return float(result.x)


def _expanded_hamiltonian(derivatives: Tuple[float, ...], EC: float, xi: float, size: int) -> np.ndarray:
    """Hamiltoniano con el potencial en serie de Taylor, φ = ξ(a+a†), n = i(a†−a)/2ξ"""
    order = len(derivatives) - 1
    big = size + order + 2
    a = annihilation(big).real
    x = a + a.T
    p_like = a.T - a
    H = -EC / xi ** 2 * (p_like @ p_like)
    power = np.eye(big)
    for k in range(1, order + 1):
        power = power @ (xi * x)
        H += derivatives[k] / math.factorial(k) * power
    return H[:size, :size]


def _perturbative_levels(H: np.ndarray, count: int) -> np.ndarray:
    """E⁽⁰⁾ + E⁽²⁾ + E⁽³⁾ con la diagonal de H como problema no perturbado"""
    e0 = np.diag(H).copy()
    V = H - np.diag(e0)
    levels = np.empty(count)
    for n in range(count):
        with np.errstate(divide='ignore'):
            inv = 1.0 / (e0[n] - e0)
        inv[n] = 0.0
        left = V[n, :] * inv
        second = float(np.dot(V[n, :], left))
        third = float(left @ V @ (V[:, n] * inv))
        levels[n] = e0[n] + second + third
    return levels


def _csfq_derivatives(p: CsfqParams) -> Tuple[float, float, Tuple[float, ...]]:
    phi0 = csfq_potential_minimum(p)
    derivatives = tuple(csfq_potential_derivative(p, phi0, k) for k in range(2 * p.L + 1))
    if derivatives[2] <= 0:
        raise NumericalDomainError(f"El potencial no tiene mínimo estable en f={p.f}")
    phi_zpf = (2 * p.EC / derivatives[2]) ** 0.25
    return phi0, phi_zpf, derivatives


def _csfq_levels_at(p: CsfqParams, xi: float, count: int, derivatives: Tuple[float, ...]) -> np.ndarray:
    size = count + 2 * p.L
    return _perturbative_levels(_expanded_hamiltonian(derivatives, p.EC, xi, size), count)


def _select_xi(p: CsfqParams, derivatives: Tuple[float, ...], phi_zpf: float) -> float:
    """Escaneo de ξ en [0.1, 3]·φ_zpf y refinamiento del mínimo interior de f01"""
    grid = np.linspace(0.1, 3.0, XI_GRID_POINTS) * phi_zpf
    f01 = np.array([np.diff(_csfq_levels_at(p, xi, 2, derivatives))[0] for xi in grid])

    candidates = [
        i for i in range(1, len(grid) - 1)
        if np.isfinite(f01[i - 1:i + 2]).all() and f01[i] <= f01[i - 1] and f01[i] <= f01[i + 1]
    ]
    if not candidates:
        logger.error(f"No interior minimum of f01(xi) for CSFQ {p}")
        raise NumericalDomainError(
            f"El escaneo de ξ no encontró un mínimo interior: CSFQ fuera del dominio del modelo (f={p.f})"
        )

    best = min(candidates, key=lambda i: abs(math.log(grid[i] / phi_zpf)))
    result = minimize_scalar(
        lambda xi: float(np.diff(_csfq_levels_at(p, xi, 2, derivatives))[0]),
        bounds=(grid[best - 1], grid[best + 1]),
        method='bounded',
        options={'xatol': 1e-10},
    )
    return float(result.x)


@lru_cache(maxsize=4096)
def _csfq_perturbative_cached(EC: float, EJ: float, alpha: float, f: float, L: int, count: int) -> Tuple[float, ...]:
    p = CsfqParams(EC=EC, EJ=EJ, alpha=alpha, f=f, L=L)
    _, phi_zpf, derivatives = _csfq_derivatives(p)
    xi = _select_xi(p, derivatives, phi_zpf)
    levels = _csfq_levels_at(p, xi, count, derivatives)
    logger.debug(f"CSFQ f={f}: xi={xi:.6f} (phi_zpf={phi_zpf:.6f}), f01={levels[1] - levels[0]:.6f}")
    return tuple(float(e) for e in levels - levels[0])


def csfq_spectrum(p: CsfqParams) -> Tuple[float, float]:
    """
    Frecuencia y anarmonicidad del CSFQ por expansión del potencial.

    El potencial se expande a orden 2L alrededor de su mínimo, se escoge ξ
    minimizando f01 y se suman las correcciones perturbativas de segundo y
    tercer orden.

    Args:
        p: Parámetros del CSFQ (los anclajes se ignoran aquí)

    Returns:
        (ω01, δ) en GHz

    Raises:
        NumericalDomainError: Si no hay mínimo interior en ξ
    """
    energies = _csfq_perturbative_cached(p.EC, p.EJ, p.alpha, p.f, p.L, 3)
    return energies[1] - energies[0], energies[2] - 2 * energies[1] + energies[0]


def csfq_ladder(p: CsfqParams, k: int) -> LevelLadder:
    """
    Escalera de k niveles del CSFQ.

    Sin anclajes se usan directamente los niveles perturbativos. Con anclajes
    se construye una escalera de Duffing con ω01 y δ desplazados para que en
    f = 0.5 coincidan con los valores medidos.
    """
    if p.omega01_ss is None and p.delta_ss is None:
        return LevelLadder(energies=_csfq_perturbative_cached(p.EC, p.EJ, p.alpha, p.f, p.L, k))

    omega01, delta = csfq_spectrum(p)
    omega_ss, delta_ss = csfq_spectrum(p.model_copy(update={'f': 0.5}))
    if p.omega01_ss is not None:
        omega01 += p.omega01_ss - omega_ss
    if p.delta_ss is not None:
        delta += p.delta_ss - delta_ss
    return duffing_ladder(DuffingParams(omega=omega01, delta=delta, nlevels=k))


def csfq_exact_ladder(p: CsfqParams, k: int, nfock: int = 60) -> LevelLadder:
    """
    Oráculo no perturbativo: potencial coseno completo en base armónica.

    Args:
        p: Parámetros del CSFQ
        k: Número de niveles
        nfock: Dimensión de la base de Fock

    Returns:
        Escalera con E(0) = 0
    """
    phi0, phi_zpf, derivatives = _csfq_derivatives(p)
    a = annihilation(nfock)
    x = phi_zpf * (a + a.conj().T)
    p_like = a.conj().T - a
    kinetic = -p.EC / phi_zpf ** 2 * (p_like @ p_like)

    # cos(c·φ + b) = Re[e^{ib} e^{icφ}] con φ = φ0 + x
    evals, evecs = eigh(x)
    def cos_of(c: float, b: float) -> np.ndarray:
        phase = np.exp(1j * (c * (phi0 + evals) + b))
        return (evecs * phase.real) @ evecs.conj().T

    potential = -2 * p.EJ * cos_of(0.5, 0.0) - p.alpha * p.EJ * cos_of(1.0, -2 * math.pi * p.f)
    levels = eigh(kinetic + potential, eigvals_only=True, subset_by_index=[0, k - 1])
    return _ladder_from_levels(levels)


# ==========================================================================
# Transmon sintonizable y acoplamientos
# ==========================================================================

def tunable_transmon_freq(p: TunableTransmonParams) -> Tuple[float, float]:
    """
    ω01(f) = √(8·EC·EJ(f)) − EC con EJ(f) = EJΣ√(cos²πf + d² sin²πf).

    Returns:
        (ω01, δ) en GHz con δ = −EC
    """
    ej = p.EJsum * math.sqrt(math.cos(math.pi * p.f) ** 2 + (p.d * math.sin(math.pi * p.f)) ** 2)
    return math.sqrt(8 * p.EC * ej) - p.EC, -p.EC


def flux_derivative(f01_of_f: Callable[[float], float], f: float, h: float = 1e-5) -> float:
    """D_Φ = |∂f01/∂Φ| en GHz/Φ0 por diferencia central"""
    return abs(f01_of_f(f + h) - f01_of_f(f - h)) / (2 * h)


def coupling_from_capacitances(
    C1r: float,
    C2r: float,
    C1: float,
    C2: float,
    Cr: float,
    omega1: float,
    omega2: float,
    omega_r: float,
) -> Tuple[float, float, float]:
    """
    Acoplamientos qubit-resonador y qubit-qubit de la red de tres capacitores.

    Args:
        C1r, C2r: Capacitancias de acoplamiento (fF)
        C1, C2, Cr: Capacitancias totales de cada elemento (fF)
        omega1, omega2, omega_r: Frecuencias (GHz)

    Returns:
        (g_1r, g_2r, g_12) en GHz

    Raises:
        ValueError: Si alguna capacitancia total no es positiva
    """
    if min(C1, C2, Cr) <= 0 or min(C1r, C2r) < 0:
        raise ValueError('Las capacitancias deben ser positivas')
    g1r = 0.5 * C1r / math.sqrt(C1 * Cr) * math.sqrt(omega1 * omega_r)
    g2r = 0.5 * C2r / math.sqrt(C2 * Cr) * math.sqrt(omega2 * omega_r)
    g12 = 0.5 * C1r * C2r / (math.sqrt(C1 * C2) * Cr) * math.sqrt(omega1 * omega2)
    return g1r, g2r, g12


def tunable_window(EC: float, EJsum: float, ratios: List[float]) -> List[float]:
    """Rango de sintonía ω01(0) − ω01(0.5) para cada razón de uniones"""
    windows = []
    for a in ratios:
        top, _ = tunable_transmon_freq(TunableTransmonParams.from_ratio(EC, EJsum, a, 0.0))
        bottom, _ = tunable_transmon_freq(TunableTransmonParams.from_ratio(EC, EJsum, a, 0.5))
        windows.append(top - bottom)
    return windows
