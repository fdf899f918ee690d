"""
Canales cuánticos en representación de matriz de transferencia de Pauli y
parámetros de coherencia.
"""
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class QuantumChannel(BaseModel):
    """Matriz de transferencia de Pauli real R_ij = Tr[P_i·Λ(P_j)]/d"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ptm: np.ndarray

    @model_validator(mode='after')
    def check_shape(self) -> 'QuantumChannel':
        size = self.ptm.shape[0]
        if self.ptm.shape != (size, size) or size not in (4, 16):
            raise ValueError(f"PTM de forma inválida: {self.ptm.shape}")
        return self

    @property
    def n_qubits(self) -> int:
        return int(round(math.log(self.ptm.shape[0], 4)))

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def is_trace_preserving(self, atol: float = 1e-12) -> bool:
        first = np.zeros(self.ptm.shape[0])
        first[0] = 1.0
        return bool(np.allclose(self.ptm[0], first, atol=atol))


class CoherenceTimes(BaseModel):
    """T1 y T2 en μs; None o infinito desactiva el proceso"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    T1: float = Field(default=math.inf, gt=0)
    T2: float = Field(default=math.inf, gt=0)

    @model_validator(mode='after')
    def check_bound(self) -> 'CoherenceTimes':
        if self.T2 > 2 * self.T1 * (1 + 1e-9):
            raise ValueError(f"T2 = {self.T2} μs excede 2·T1 = {2 * self.T1} μs")
        return self


class DephasingModel(BaseModel):
    """
    Desfase por ruido de flujo.

    Forma lineal Γφ = slope·D_Φ + offset y forma Γφ = 2π·D_Φ·√(A_Φ·|ln ω_ir·t|).
    `slope` y `offset` están en μs⁻¹ con D_Φ en GHz/Φ0.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    slope: float = Field(default=0.018096, ge=0)
    offset: float = Field(default=0.039, ge=0)
    A_phi: float = Field(default=1e-12, gt=0)
    omega_ir: float = Field(default=2 * math.pi * 1e-6, gt=0)


class GateError(BaseModel):
    """Fidelidad promedio y error de un gate"""
    model_config = ConfigDict(frozen=True)

    fidelity: float
    error: float


class DegenerateGap(BaseModel):
    """Separación entre dos estados casi degenerados (GHz)"""
    model_config = ConfigDict(frozen=True)

    gap: float
    coupling: float
    flagged: bool = False
