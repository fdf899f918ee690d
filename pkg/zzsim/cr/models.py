"""
Coeficientes de resonancia cruzada, factor dinámico η y resultados de
calibración.
"""
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..hamiltonian.models import HamiltonianMatrix
from ..transforms.models import PauliCoefficients

CR_TERMS = ('ZI', 'IX', 'IY', 'IZ', 'ZX', 'ZY', 'ZZ')


class CRCoefficients(BaseModel):
    """
    Hamiltoniano CR efectivo H = Σ β_P·P/2 + β_ZZ·ZZ/4 en GHz.

    `pauli` guarda los coeficientes α de la descomposición genérica; los
    términos de dos cuerpos distintos de ZZ cumplen β = α/2.
    """
    model_config = ConfigDict(frozen=True)

    pauli: PauliCoefficients
    Omega: float = 0.0
    omega_d: float = 0.0
    flagged: bool = False

    def beta(self, label: str) -> float:
        value = self.pauli[label]
        if label.count('I') == 0 and label != 'ZZ':
            return value / 2
        return value

    @property
    def betas(self) -> Dict[str, float]:
        return {label: self.beta(label) for label in CR_TERMS}

    @classmethod
    def from_betas(cls, betas: Dict[str, float], **kwargs) -> 'CRCoefficients':
        """Construye los coeficientes desde valores β (resto en cero)"""
        alphas = {
            label: (2 * value if label.count('I') == 0 and label != 'ZZ' else value)
            for label, value in betas.items()
        }
        return cls(pauli=PauliCoefficients(n_qubits=2, coefficients=alphas), **kwargs)


class CRFrame(BaseModel):
    """
    Hamiltoniano estático y cuadraturas de excitación unitarias expresados en
    la base vestida, reutilizables para cualquier amplitud.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    H_dressed: HamiltonianMatrix
    control_quadrature: np.ndarray
    crosstalk_quadrature: np.ndarray
    target_quadrature: np.ndarray
    computational: Tuple[int, ...]
    omega_target: float


class EtaParams(BaseModel):
    """Entradas del factor dinámico: Δ = ω2 − ω1, anarmonicidades y J"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    delta: float
    delta1: float
    delta2: float
    J01: float
    J10: float


class EtaReport(BaseModel):
    """η (1/GHz) y los términos A0..A6 de la serie"""
    model_config = ConfigDict(frozen=True)

    eta: float
    r: float
    gamma: float
    terms: Tuple[float, ...]
    flagged: bool = False


class CancellationReport(BaseModel):
    """Amplitud Ω* (GHz) que anula el ZZ total; None indica que no existe"""
    model_config = ConfigDict(frozen=True)

    omega_star_la: Optional[float] = None
    omega_star_on: Optional[float] = None
    omega_star_closed: Optional[float] = None


class SlopeFit(BaseModel):
    """β_ZX(Ω) = BΩ + CΩ³ y β_IX(Ω) = DΩ + EΩ³; K es la pendiente IX por unidad de excitación directa del objetivo"""
    model_config = ConfigDict(frozen=True)

    B: float
    C: float
    D: float
    E: float
    K: Optional[float] = None


class ActiveCancellation(BaseModel):
    """Tono de cancelación A·cos(ω_d t + φ) sobre el objetivo"""
    model_config = ConfigDict(frozen=True)

    A: float = Field(ge=0)
    phi: float
    residual: float
    converged: bool


class Calibration(BaseModel):
    """Amplitud calibrada para un ZX90 eco con segmentos de duración τ"""
    model_config = ConfigDict(frozen=True)

    Omega: float
    tau: float
    rate: float
    gate_length: float
