from pathlib import Path

import pytest

from zzsim.cli.services import load_device
from zzsim.hamiltonian.models import DeviceSpec, SubsystemSpec, CouplingSpec

DEVICES = Path(__file__).resolve().parent.parent / 'devices'


def explicit(id: str, omega: float, delta: float, dim: int = 4, role: str = None) -> SubsystemSpec:
    return SubsystemSpec(
        id=id,
        kind='explicit-ladder',
        params={'omega': omega, 'delta': delta},
        dim=dim,
        role=role,
    )


def two_qubit_bus(omega1: float = 5.0, omega2: float = 5.1, omega_c: float = 6.3,
                  delta: float = -0.33, g: float = 0.05, g12: float = 0.0,
                  dim: int = 4, rwa: bool = False) -> DeviceSpec:
    couplings = [CouplingSpec(i='q1', j='c', g=g), CouplingSpec(i='q2', j='c', g=g)]
    if g12:
        couplings.append(CouplingSpec(i='q1', j='q2', g=g12))
    return DeviceSpec(
        subsystems=(
            explicit('q1', omega1, delta, dim),
            SubsystemSpec(id='c', kind='resonator', params={'omega_r': omega_c}, dim=dim),
            explicit('q2', omega2, delta, dim),
        ),
        couplings=tuple(couplings),
        rwa=rwa,
    )


@pytest.fixture
def device_file():
    """Carga un archivo de la biblioteca de dispositivos por nombre"""
    def load(name: str):
        return load_device(str(DEVICES / f"{name}.json"))
    return load


@pytest.fixture
def bus_device() -> DeviceSpec:
    return two_qubit_bus()


@pytest.fixture
def make_bus():
    return two_qubit_bus


@pytest.fixture
def make_explicit():
    return explicit
