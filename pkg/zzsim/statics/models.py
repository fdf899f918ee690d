"""
Resultados de ZZ estático y de la condición de cancelación.
"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class StaticZZReport(BaseModel):
    """ZZ estático por diagonalización exacta, SW y (si aplica) cuarto orden, en GHz"""
    model_config = ConfigDict(frozen=True)

    zeta_exact: float
    zeta_sw: Optional[float] = None
    zeta_pt4: Optional[float] = None
    flagged: bool = False


class FreedomCondition(BaseModel):
    """γ = J10/J01 y la desintonía Δ̄ que anula el ZZ de segundo orden"""
    model_config = ConfigDict(frozen=True)

    gamma: float
    delta_bar_required: float


class TunableCouplerParams(BaseModel):
    """Topología qubit-acoplador sintonizable-qubit para la teoría de perturbaciones"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    omega1: float = Field(gt=0)
    omega2: float = Field(gt=0)
    omega_c: float = Field(gt=0)
    delta1: float
    delta2: float
    delta_c: float
    g1c: float
    g2c: float
    g12: float = 0.0


class PerturbativeZZ(BaseModel):
    """ζ total y su contribución de cada orden"""
    model_config = ConfigDict(frozen=True)

    zeta: float
    zeta2: float
    zeta3: float
    zeta4: float
