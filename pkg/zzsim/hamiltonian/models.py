"""
Descripción inmutable de un dispositivo: subsistemas, acoplamientos y
términos de excitación.
"""
from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..spectra.models import (
    CsfqParams,
    ExplicitLadderParams,
    ResonatorParams,
    TransmonParams,
    TunableTransmonParams,
)


class SubsystemKind(str, Enum):
    TRANSMON = 'transmon'
    CSFQ = 'csfq'
    TUNABLE_TRANSMON = 'tunable-transmon'
    RESONATOR = 'resonator'
    EXPLICIT_LADDER = 'explicit-ladder'


PARAMS_BY_KIND = {
    SubsystemKind.TRANSMON.value: TransmonParams,
    SubsystemKind.CSFQ.value: CsfqParams,
    SubsystemKind.TUNABLE_TRANSMON.value: TunableTransmonParams,
    SubsystemKind.RESONATOR.value: ResonatorParams,
    SubsystemKind.EXPLICIT_LADDER.value: ExplicitLadderParams,
}

SubsystemParams = Union[TransmonParams, CsfqParams, TunableTransmonParams, ResonatorParams, ExplicitLadderParams]


class SubsystemSpec(BaseModel):
    """Elemento del circuito con su truncamiento"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    id: str
    kind: SubsystemKind
    params: SubsystemParams
    dim: int = Field(default=5, ge=2)
    role: Optional[Literal['qubit', 'coupler']] = None

    @model_validator(mode='before')
    @classmethod
    def parse_params(cls, data):
        if isinstance(data, dict) and isinstance(data.get('params'), dict):
            kind = data.get('kind')
            kind = kind.value if isinstance(kind, SubsystemKind) else kind
            params_model = PARAMS_BY_KIND.get(kind)
            if params_model is not None:
                data = {**data, 'params': params_model.model_validate(data['params'])}
        return data

    @model_validator(mode='after')
    def check_params_kind(self) -> 'SubsystemSpec':
        expected = PARAMS_BY_KIND[self.kind.value]
        if not isinstance(self.params, expected):
            raise ValueError(f"params de '{self.id}' no corresponden al tipo {self.kind.value}")
        return self

    @property
    def resolved_role(self) -> str:
        if self.role is not None:
            return self.role
        return 'coupler' if self.kind == SubsystemKind.RESONATOR else 'qubit'


class CouplingSpec(BaseModel):
    """Acoplamiento −g(a_i − a_i†)(a_j − a_j†)"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    i: str
    j: str
    g: float

    @model_validator(mode='after')
    def check_distinct(self) -> 'CouplingSpec':
        if self.i == self.j:
            raise ValueError(f"un acoplamiento no puede unir '{self.i}' consigo mismo")
        return self

    @property
    def key(self) -> str:
        return f"{self.i}-{self.j}"

    def joins(self, a: str, b: str) -> bool:
        return {self.i, self.j} == {a, b}


class DeviceSpec(BaseModel):
    """Dispositivo completo; `rwa` descarta los términos contra-rotantes"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    subsystems: Tuple[SubsystemSpec, ...]
    couplings: Tuple[CouplingSpec, ...] = ()
    rwa: bool = False

    @model_validator(mode='after')
    def check_references(self) -> 'DeviceSpec':
        ids = [s.id for s in self.subsystems]
        if len(set(ids)) != len(ids):
            raise ValueError(f"ids de subsistema repetidos: {ids}")
        seen = set()
        for c in self.couplings:
            for ref in (c.i, c.j):
                if ref not in ids:
                    raise ValueError(f"el acoplamiento {c.key} referencia un subsistema inexistente: {ref}")
            pair = frozenset((c.i, c.j))
            if pair in seen:
                raise ValueError(f"acoplamiento repetido entre {c.i} y {c.j}")
            seen.add(pair)
        return self

    @property
    def ids(self) -> List[str]:
        return [s.id for s in self.subsystems]

    @property
    def dims(self) -> List[int]:
        return [s.dim for s in self.subsystems]

    def index(self, subsystem_id: str) -> int:
        try:
            return self.ids.index(subsystem_id)
        except ValueError:
            raise KeyError(f"subsistema inexistente: {subsystem_id}")

    def subsystem(self, subsystem_id: str) -> SubsystemSpec:
        return self.subsystems[self.index(subsystem_id)]

    def qubit_ids(self) -> List[str]:
        return [s.id for s in self.subsystems if s.resolved_role == 'qubit']

    def coupler_ids(self) -> List[str]:
        return [s.id for s in self.subsystems if s.resolved_role == 'coupler']

    def coupling(self, a: str, b: str) -> float:
        """Intensidad g entre dos subsistemas (0 si no están acoplados)"""
        for c in self.couplings:
            if c.joins(a, b):
                return c.g
        return 0.0


class DriveSpec(BaseModel):
    """
    Excitación de resonancia cruzada con diafonía clásica y tono de cancelación.

    El tono de cancelación A·cos(ω_d t + φ_A) actúa sobre el qubit objetivo.
    `model` elige el Hamiltoniano del análisis: `effective` usa los dos qubits
    con el bus eliminado, `circuit` el circuito completo y `auto` el efectivo
    cuando todos los acopladores son resonadores.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    control: str
    target: Optional[str] = None
    omega_d: Optional[float] = None
    Omega: float = Field(default=0.0, ge=0)
    phi0: float = 0.0
    crosstalk_target: Optional[str] = None
    R: float = Field(default=0.0, ge=0)
    phiR: float = 0.0
    A: float = Field(default=0.0, ge=0)
    phiA: float = 0.0
    model: Literal['auto', 'effective', 'circuit'] = 'auto'


class HamiltonianMatrix(BaseModel):
    """Matriz hermítica densa en la base producto etiquetada (GHz)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ids: Tuple[str, ...]
    dims: Tuple[int, ...]
    matrix: np.ndarray
    basis: Tuple[Tuple[int, ...], ...]

    @model_validator(mode='after')
    def check_shape(self) -> 'HamiltonianMatrix':
        dim = int(np.prod(self.dims))
        if self.matrix.shape != (dim, dim) or len(self.basis) != dim:
            raise ValueError(f"dimensión inconsistente: {self.matrix.shape} frente a {dim}")
        self.matrix.setflags(write=False)
        return self

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def excitations(self) -> np.ndarray:
        """Número total de excitaciones de cada estado de la base"""
        return np.array([sum(label) for label in self.basis])

    def index_of(self, label: Tuple[int, ...]) -> int:
        return self.basis.index(tuple(label))

    def with_matrix(self, matrix: np.ndarray) -> 'HamiltonianMatrix':
        return HamiltonianMatrix(ids=self.ids, dims=self.dims, matrix=np.array(matrix), basis=self.basis)


def label_for(device: DeviceSpec, excitations: Dict[str, int]) -> Tuple[int, ...]:
    """Multi-índice con las excitaciones dadas y el resto en el fundamental"""
    return tuple(excitations.get(s.id, 0) for s in device.subsystems)
