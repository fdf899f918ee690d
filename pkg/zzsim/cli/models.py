"""
Esquema de los archivos de dispositivo y de la configuración de una ejecución.

Frecuencias en GHz, tiempos en ns, T1/T2 en μs y flujo en unidades de Φ0.
"""
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..channels.models import CoherenceTimes, DephasingModel
from ..hamiltonian.models import CouplingSpec, DeviceSpec, DriveSpec, SubsystemSpec
from ..shared.errors import ConfigError
from ..three_qubit.models import ThreeQubitDevice


class SweepSpec(BaseModel):
    """Barrido lineal de un parámetro: `path` toma `points` valores entre `start` y `stop`"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    path: str
    start: float
    stop: float
    points: int = Field(ge=2)

    @property
    def values(self) -> List[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.points)]

    @property
    def bounds(self) -> Tuple[float, float]:
        return self.start, self.stop


class NoiseSpec(BaseModel):
    """Tiempos de coherencia por qubit y modelo de desfase por flujo"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    coherence: Dict[str, CoherenceTimes] = {}
    dephasing: DephasingModel = DephasingModel()
    crosstalk_model: bool = False


class CZSpec(BaseModel):
    """
    Pulso de flujo del gate CZ sobre el transmon asimétrico.

    `zz` fija un α_ZZ constante (GHz) en lugar del ajuste ZZ(ω1) y `shape`
    elige entre el pulso tanh y el cuadrado.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    qubit: str
    f_off: float = Field(ge=0, le=0.5)
    f_on: float = Field(ge=0, le=0.5)
    x: float = Field(default=5.0, gt=0)
    phase: float = Field(default=0.5, gt=0)
    pair: Tuple[Tuple[int, ...], Tuple[int, ...]] = ((1, 0, 1), (0, 2, 0))
    shape: Literal['tanh', 'square'] = 'tanh'
    zz: Optional[float] = Field(default=None, gt=0)


class DeviceFile(BaseModel):
    """
    Documento JSON de un dispositivo.

    Un archivo describe un circuito general (`subsystems`, `couplings`) o el
    modelo de tres qubits (`three_qubit`). `sweeps` asocia un comando con su
    barrido por defecto.
    """
    model_config = ConfigDict(frozen=True, extra='forbid')

    name: Optional[str] = None
    description: str = ''
    units: Dict[str, str] = {}
    subsystems: Tuple[SubsystemSpec, ...] = ()
    couplings: Tuple[CouplingSpec, ...] = ()
    rwa: bool = False
    three_qubit: Optional[ThreeQubitDevice] = None
    drives: Tuple[DriveSpec, ...] = ()
    noise: Optional[NoiseSpec] = None
    sweeps: Dict[str, SweepSpec] = {}
    cz: Optional[CZSpec] = None

    @model_validator(mode='after')
    def check_content(self) -> 'DeviceFile':
        if not self.subsystems and self.three_qubit is None:
            raise ValueError('se requiere subsystems o three_qubit')
        # Valida referencias cruzadas del circuito
        if self.subsystems:
            device = self.device()
            for k, drive in enumerate(self.drives):
                for ref in (drive.control, drive.target, drive.crosstalk_target):
                    if ref is not None and ref not in device.ids:
                        raise ValueError(f"drives.{k} referencia un subsistema inexistente: {ref}")
            if self.cz is not None and self.cz.qubit not in device.ids:
                raise ValueError(f"cz.qubit referencia un subsistema inexistente: {self.cz.qubit}")
        return self

    def device(self) -> DeviceSpec:
        if not self.subsystems:
            raise ConfigError('el archivo no describe un circuito (subsystems vacío)')
        return DeviceSpec(subsystems=self.subsystems, couplings=self.couplings, rwa=self.rwa)

    def drive(self, index: int = 0) -> DriveSpec:
        if index >= len(self.drives):
            raise ConfigError(f"el archivo no define drives.{index}")
        return self.drives[index]

    def coherence_pair(self, control: str, target: str) -> Optional[Tuple[CoherenceTimes, CoherenceTimes]]:
        """T1/T2 de (control, objetivo); None si el archivo no trae ruido"""
        if self.noise is None or not self.noise.coherence:
            return None
        try:
            return self.noise.coherence[control], self.noise.coherence[target]
        except KeyError as e:
            raise ConfigError(f"noise.coherence no define el qubit {e}")


class RunConfig(BaseModel):
    """Opciones de una ejecución de la CLI"""
    model_config = ConfigDict(frozen=True, extra='forbid')

    device: str
    command: str
    sweep: Optional[SweepSpec] = None
    fmt: Literal['csv', 'json'] = 'csv'
    out: Optional[str] = None
    method: Optional[str] = None
    tol: float = Field(default=1e-6, gt=0)
    jobs: Optional[int] = Field(default=None, ge=0)
