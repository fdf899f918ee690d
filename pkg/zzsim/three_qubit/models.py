"""
Dispositivos de tres qubits acoplados por resonadores y sus coeficientes de
Pauli de dos y tres cuerpos.
"""
from enum import Enum
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..transforms.models import PauliCoefficients

Triple = Tuple[float, float, float]

PAIRS = ((0, 1), (0, 2), (1, 2))
THREE_Q_TERMS = ('ZII', 'IZI', 'IIZ', 'ZZI', 'ZIZ', 'IZZ', 'ZZZ')


class Topology(str, Enum):
    TRIANGLE = 'triangle'
    CHAIN = 'chain'


class Method(str, Enum):
    RWA_PT = 'RWA-PT'
    RWA_SSW = 'RWA-SSW'
    RWA_SW = 'RWA-SW'
    NRWA_PT = 'NRWA-PT'
    NRWA_SSW = 'NRWA-SSW'
    NRWA_SW = 'NRWA-SW'

    @property
    def nrwa(self) -> bool:
        return self.value.startswith('NRWA')

    @property
    def approach(self) -> str:
        return self.value.split('-')[1]

    @property
    def state_dependent(self) -> bool:
        """Sólo SW conserva J dependiente de los niveles"""
        return self.approach == 'SW'


class ThreeQubitCoupler(BaseModel):
    """Resonador armónico con su acoplamiento a cada uno de los tres qubits"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    omega: float = Field(gt=0)
    g: Triple = (0.0, 0.0, 0.0)


class ThreeQubitDevice(BaseModel):
    """
    Tres qubits de Duffing, sus acopladores y los acoplamientos directos
    (g12, g13, g23), todo en GHz.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    omega: Triple
    delta: Triple
    couplers: Tuple[ThreeQubitCoupler, ...]
    g_direct: Triple = (0.0, 0.0, 0.0)
    topology: Topology = Topology.TRIANGLE

    @model_validator(mode='after')
    def check_topology(self) -> 'ThreeQubitDevice':
        expected = 3 if self.topology == Topology.TRIANGLE else 2
        if len(self.couplers) != expected:
            raise ValueError(
                f"la topología {self.topology.value} requiere {expected} acopladores, hay {len(self.couplers)}"
            )
        return self

    def direct(self, q: int, p: int) -> float:
        return self.g_direct[PAIRS.index(tuple(sorted((q, p))))]


class EffectiveThreeQubit(BaseModel):
    """
    Modelo efectivo tras eliminar los acopladores.

    `levels[q]` guarda Ē_q(n) para n = 0, 1, 2 y `J` el intercambio
    J^{nm}_{qq'} indexado por (q, q', n, m) con q < q'.
    """
    model_config = ConfigDict(frozen=True)

    levels: Tuple[Tuple[float, ...], ...]
    J: Dict[Tuple[int, int, int, int], float]
    nrwa: bool = False
    max_ratio: float = 0.0

    def j(self, q: int, p: int, n: int = 0, m: int = 1) -> float:
        if q > p:
            q, p, n, m = p, q, m, n
        return self.J[(q, p, n, m)]

    def omega_bar(self, q: int, n: int = 0) -> float:
        return self.levels[q][n + 1] - self.levels[q][n]


class ThreeQubitPauli(BaseModel):
    """Coeficientes de Pauli de un método con marca de colisión de frecuencias"""
    model_config = ConfigDict(frozen=True)

    method: Method
    pauli: PauliCoefficients
    flagged: bool = False

    def alpha(self, label: str) -> float:
        return self.pauli[label]

    @property
    def alphas(self) -> Dict[str, float]:
        return {label: self.pauli[label] for label in THREE_Q_TERMS}
