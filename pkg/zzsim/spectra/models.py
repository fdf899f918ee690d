"""
Parámetros eléctricos de los elementos de circuito y escaleras de niveles.

Todas las frecuencias y energías están en GHz (frecuencia lineal).
"""
import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class TransmonParams(BaseModel):
    """Transmon en base de carga"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    EC: float = Field(gt=0)
    EJ: float = Field(ge=0)
    ng: float = 0.0
    ncut: int = Field(default=15, ge=10)


class DuffingParams(BaseModel):
    """Oscilador de Duffing: frecuencia 0→1 y anarmonicidad"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    omega: float = Field(gt=0)
    delta: float = 0.0
    nlevels: int = Field(default=5, ge=2)


class CsfqParams(BaseModel):
    """
    Qubit de flujo con shunt capacitivo.

    Los anclajes opcionales `omega01_ss` y `delta_ss` desplazan ω01(f) y δ(f)
    para que pasen por los valores medidos en el punto dulce.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    EC: float = Field(gt=0)
    EJ: float = Field(gt=0)
    alpha: float = Field(gt=0, lt=0.5)
    f: float = Field(default=0.5, ge=0, le=1)
    L: int = Field(default=10, ge=2)
    omega01_ss: Optional[float] = None
    delta_ss: Optional[float] = None


class TunableTransmonParams(BaseModel):
    """Transmon asimétrico sintonizable por flujo"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    EC: float = Field(gt=0)
    EJsum: float = Field(gt=0)
    d: float = Field(default=0.0, ge=0, lt=1)
    f: float = 0.0

    @classmethod
    def from_ratio(cls, EC: float, EJsum: float, a: float, f: float = 0.0) -> 'TunableTransmonParams':
        """Construye los parámetros a partir de la razón de uniones a = EJ1/EJ2"""
        return cls(EC=EC, EJsum=EJsum, d=(a - 1) / (a + 1), f=f)


class ResonatorParams(BaseModel):
    """Resonador armónico dado por su frecuencia o por L (nH) y C (fF)"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    omega_r: Optional[float] = Field(default=None, gt=0)
    L: Optional[float] = Field(default=None, gt=0)
    C: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode='after')
    def derive_frequency(self) -> 'ResonatorParams':
        if self.omega_r is None:
            if self.L is None or self.C is None:
                raise ValueError('se requiere omega_r o el par (L, C)')
            # nH·fF = 1e-24 s², frecuencia lineal en GHz
            object.__setattr__(self, 'omega_r', 1e3 / (2 * math.pi * math.sqrt(self.L * self.C)))
        return self


class ExplicitLadderParams(BaseModel):
    """Escalera dada explícitamente por energías o por (omega, delta)"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    omega: Optional[float] = None
    delta: float = 0.0
    energies: Optional[Tuple[float, ...]] = None

    @model_validator(mode='after')
    def check_source(self) -> 'ExplicitLadderParams':
        if self.energies is None and self.omega is None:
            raise ValueError('se requiere omega o energies')
        return self


class LevelLadder(BaseModel):
    """Energías desnudas ordenadas E(n) con E(0) = 0"""
    model_config = ConfigDict(frozen=True)

    energies: Tuple[float, ...]

    def transition(self, n: int) -> float:
        """Frecuencia de la transición n → n+1"""
        return self.energies[n + 1] - self.energies[n]

    @property
    def omega01(self) -> float:
        return self.transition(0)

    @property
    def anharmonicity(self) -> float:
        return self.energies[2] - 2 * self.energies[1] + self.energies[0]

    def __len__(self) -> int:
        return len(self.energies)
