"""
Servicios de la CLI: carga de archivos de dispositivo, barridos y armado de
las filas de cada comando.
"""
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from ..channels.models import CoherenceTimes
from ..channels.services import (
    coherence_limited_error,
    cz_gap_scan,
    cz_minimum_gap,
    cz_phase_gate_length,
    gate_error_flux_scan,
    gate_error_length_scan,
    omega1_of_f,
)
from ..cr.models import CR_TERMS, CRCoefficients
from ..cr.services import cancellation_amplitude, cr_coefficient_sweep, echoed_cr_rate
from ..hamiltonian.services import device_ladders, resolve_target, with_parameter
from ..shared.env import env
from ..shared.errors import ConfigError
from ..shared.files import read_json_file
from ..shared.logger import get_logger
from ..shared.parallel import parallel_map
from ..statics.services import find_zero, get_evaluator, static_zz_report, zz_sweep
from ..three_qubit.models import Method
from ..three_qubit.services import method_comparison
from .models import DeviceFile, RunConfig, SweepSpec

logger = get_logger(__name__)

CANCELLATION_METHODS = ('la', 'on', 'closed')


# ==================== Entrada ====================

def _validation_message(error: ValidationError) -> str:
    return '; '.join(
        f"{'.'.join(str(part) for part in item['loc']) or '<raíz>'}: {item['msg']}"
        for item in error.errors()
    )


def resolve_device_path(name: str) -> Path:
    """
    Ruta de un archivo de dispositivo.

    Acepta una ruta existente o el nombre de un archivo de DEVICES_DIR, con o
    sin la extensión `.json`.
    """
    path = Path(name)
    if path.exists():
        return path
    library = Path(env['DEVICES_DIR'])
    for candidate in (library / name, library / f"{name}.json"):
        if candidate.exists():
            return candidate
    logger.error(f"Device file not found: {name}")
    raise ConfigError(f"No existe el archivo de dispositivo: {name}")


def load_device(name: str) -> DeviceFile:
    """
    Lee y valida un archivo de dispositivo.

    Args:
        name: Ruta o nombre en la biblioteca de dispositivos

    Returns:
        Archivo validado

    Raises:
        ConfigError: Si el archivo no existe, no es JSON o no cumple el esquema
    """
    path = resolve_device_path(name)
    data = read_json_file(str(path))
    try:
        device_file = DeviceFile.model_validate(data)
    except ValidationError as e:
        message = _validation_message(e)
        logger.error(f"Invalid device file {path}: {message}")
        raise ConfigError(f"Archivo de dispositivo inválido {path}: {message}") from e
    logger.info(f"Loaded device file {path}")
    return device_file


def parse_sweep(text: str) -> SweepSpec:
    """
    Interpreta `ruta=inicio:fin:puntos`.

    Raises:
        ConfigError: Si el texto no tiene esa forma o hay menos de dos puntos
    """
    path, sep, spec = text.partition('=')
    parts = spec.split(':')
    if not sep or not path or len(parts) != 3:
        raise ConfigError(f"barrido inválido '{text}', se espera ruta=inicio:fin:puntos")
    try:
        return SweepSpec(path=path.strip(), start=float(parts[0]), stop=float(parts[1]), points=int(parts[2]))
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise ConfigError(f"barrido inválido '{text}': {_validation_message(e)}") from e
        raise ConfigError(f"barrido inválido '{text}': {e}") from e


def build_config(command: str, device: str, sweep: Optional[str] = None, **options: Any) -> RunConfig:
    """Valida las opciones de la línea de comandos"""
    try:
        return RunConfig(
            device=device,
            command=command,
            sweep=parse_sweep(sweep) if sweep else None,
            **options,
        )
    except ValidationError as e:
        raise ConfigError(f"opciones inválidas: {_validation_message(e)}") from e


def _sweep_for(config: RunConfig, device_file: DeviceFile, required: bool = False) -> Optional[SweepSpec]:
    sweep = config.sweep or device_file.sweeps.get(config.command)
    if sweep is None and required:
        raise ConfigError(f"el comando {config.command} requiere --sweep o sweeps.{config.command} en el archivo")
    return sweep


# ==================== Espectros ====================

def _ladder_rows(device_file: DeviceFile) -> List[Dict[str, Any]]:
    if device_file.three_qubit is not None and not device_file.subsystems:
        dev = device_file.three_qubit
        rows = [
            {'id': f"q{k + 1}", 'kind': 'duffing', 'omega01': w, 'delta': d, 'E0': 0.0, 'E1': w, 'E2': 2 * w + d}
            for k, (w, d) in enumerate(zip(dev.omega, dev.delta))
        ]
        rows += [
            {'id': f"c{k + 1}", 'kind': 'resonator', 'omega01': c.omega, 'delta': 0.0,
             'E0': 0.0, 'E1': c.omega, 'E2': 2 * c.omega}
            for k, c in enumerate(dev.couplers)
        ]
        return rows

    device = device_file.device()
    rows = []
    for spec, ladder in zip(device.subsystems, device_ladders(device)):
        row: Dict[str, Any] = {
            'id': spec.id,
            'kind': spec.kind.value,
            'omega01': ladder.omega01,
            'delta': ladder.anharmonicity if len(ladder) > 2 else math.nan,
        }
        row.update({f"E{n}": energy for n, energy in enumerate(ladder.energies)})
        rows.append(row)
    return rows


def spectrum_rows(device_file: DeviceFile, config: RunConfig) -> List[Dict[str, Any]]:
    """Filas (id, kind, omega01, delta, E0…) por elemento, opcionalmente a lo largo de un barrido"""
    sweep = _sweep_for(config, device_file)
    if sweep is None:
        return _ladder_rows(device_file)

    device = device_file.device()

    def evaluate(value: float) -> List[Dict[str, Any]]:
        swept = device_file.model_copy(update={'subsystems': with_parameter(device, sweep.path, value).subsystems})
        return [{sweep.path: value, **row} for row in _ladder_rows(swept)]

    blocks = parallel_map(evaluate, sweep.values, jobs=config.jobs, desc=sweep.path)
    return [row for block in blocks for row in block]


# ==================== ZZ estático ====================

def static_zz_rows(device_file: DeviceFile, config: RunConfig) -> List[Dict[str, Any]]:
    """
    ZZ exacto, SW y de cuarto orden, con las raíces del barrido al final.

    Las filas del barrido llevan `record = point` y las raíces `record = root`.
    """
    device = device_file.device()
    sweep = _sweep_for(config, device_file)
    if sweep is None:
        return [{'record': 'point', **static_zz_report(device).model_dump()}]

    rows = [
        {'record': 'point', **row}
        for row in zz_sweep(device, sweep.path, sweep.values, lambda d: static_zz_report(d).model_dump(), config.jobs)
    ]
    if all(row['zeta_exact'] == 0 for row in rows):
        logger.warning('ZZ vanishes identically along the sweep; skipping root search')
        return rows

    evaluator = get_evaluator(config.method or 'exact')
    roots = find_zero(device, sweep.path, evaluator, sweep.bounds, tol=config.tol, jobs=config.jobs)
    return rows + [{'record': 'root', sweep.path: root} for root in roots]


# ==================== Resonancia cruzada ====================

def cr_rows(device_file: DeviceFile, config: RunConfig) -> List[Dict[str, Any]]:
    """
    Coeficientes β y tasa del CR eco en función de Ω, más la amplitud de
    cancelación Ω* de cada método (`none` si no existe).
    """
    device = device_file.device()
    drive = device_file.drive()
    sweep = _sweep_for(config, device_file, required=True)
    if sweep.path != 'Omega':
        raise ConfigError(f"el barrido de cr debe ser sobre Omega, no sobre {sweep.path}")

    method = config.method or 'all'
    if method != 'all' and method not in CANCELLATION_METHODS:
        raise ConfigError(f"método de cancelación desconocido: {method}")

    rows = []
    for row in cr_coefficient_sweep(device, drive, sweep.values, jobs=config.jobs):
        betas = {label: row[f"beta_{label}"] for label in CR_TERMS}
        rows.append({'record': 'point', **row, 'f_ECR': echoed_cr_rate(CRCoefficients.from_betas(betas))})

    report = cancellation_amplitude(device, drive, method)
    methods = CANCELLATION_METHODS if method == 'all' else (method,)
    for name in methods:
        value = getattr(report, f"omega_star_{name}")
        rows.append({'record': 'summary', 'method': name, 'Omega_star': 'none' if value is None else value})
    return rows


# ==================== Error de gate ====================

def gate_error_rows(
    device_file: DeviceFile,
    config: RunConfig,
    gate_length: Optional[float] = None,
    convention: str = 'square',
) -> List[Dict[str, Any]]:
    """
    Error del ZX90 eco a lo largo de `gate_length` o del flujo del control.

    El barrido por flujo requiere `gate_length` y usa el modelo de diafonía y
    de desfase de la sección `noise` del archivo.
    """
    device = device_file.device()
    drive = device_file.drive()
    target = resolve_target(device, drive)
    coherence = device_file.coherence_pair(drive.control, target)
    sweep = _sweep_for(config, device_file, required=True)

    if sweep.path == 'gate_length':
        return gate_error_length_scan(device, drive, sweep.values, coherence, convention, config.jobs)

    if sweep.path != f"subsystems.{drive.control}.params.f":
        raise ConfigError(f"gate-error barre gate_length o subsystems.{drive.control}.params.f, no {sweep.path}")
    if gate_length is None:
        raise ConfigError('el barrido por flujo requiere --gate-length')

    noise = device_file.noise
    rows = gate_error_flux_scan(
        device,
        drive,
        gate_length,
        sweep.values,
        coherence=coherence,
        dephasing=noise.dephasing if noise else None,
        crosstalk=noise.crosstalk_model if noise else False,
        convention=convention,
        jobs=config.jobs,
    )
    for row in rows:
        row['coherence_error'] = math.nan
        if coherence is not None and math.isfinite(row['T2']):
            times = (CoherenceTimes(T1=coherence[0].T1, T2=row['T2']), coherence[1])
            row['coherence_error'] = coherence_limited_error(times, gate_length).error
    return rows


# ==================== Tres qubits ====================

def three_qubit_rows(device_file: DeviceFile, config: RunConfig) -> List[Dict[str, Any]]:
    """Coeficientes de Pauli por método; `--method` restringe a uno"""
    if device_file.three_qubit is None:
        raise ConfigError('el archivo no define la sección three_qubit')
    methods = None
    if config.method:
        try:
            methods = [Method(config.method)]
        except ValueError:
            options = ', '.join(m.value for m in Method)
            raise ConfigError(f"método desconocido '{config.method}', opciones: {options}")
    return method_comparison(device_file.three_qubit, methods, jobs=config.jobs)


# ==================== CZ ====================

def cz_rows(device_file: DeviceFile, config: RunConfig) -> List[Dict[str, Any]]:
    """
    Brecha entre los estados del par a lo largo de ω1 y resumen del gate:
    duración, brecha mínima en el anticruce y frecuencias de encendido y
    apagado. Con `cz.zz` la fase se acumula a α_ZZ constante.
    """
    if device_file.cz is None:
        raise ConfigError('el archivo no define la sección cz')
    cz = device_file.cz
    device = device_file.device()

    omega_off, omega_on = omega1_of_f(cz.f_off), omega1_of_f(cz.f_on)
    sweep = _sweep_for(config, device_file)
    if sweep is not None and sweep.path != 'omega1':
        raise ConfigError(f"el barrido de cz debe ser sobre omega1, no sobre {sweep.path}")
    omegas = sweep.values if sweep is not None else [omega_on]

    gaps = cz_gap_scan(device, cz.qubit, omegas, cz.pair, jobs=config.jobs)
    constant = {'zz_of_omega': lambda _: cz.zz, 'pole': None} if cz.zz is not None else {}
    gate_length = cz_phase_gate_length(cz.f_off, cz.f_on, cz.x, cz.phase, shape=cz.shape, **constant)
    narrowest = cz_minimum_gap(device, cz.qubit, cz.pair)

    summary = {
        'record': 'summary',
        't_g': gate_length,
        'min_gap': narrowest['gap'],
        'omega1_min_gap': narrowest['omega1'],
        'min_gap_flagged': narrowest['flagged'],
        'omega_off': omega_off,
        'omega_on': omega_on,
    }
    return [{'record': 'point', **row} for row in gaps] + [summary]


# ==================== Biblioteca ====================

def device_catalog(directory: Optional[str] = None) -> List[Dict[str, Any]]:
    """Archivos de la biblioteca de dispositivos con su nombre y descripción"""
    library = Path(directory or env['DEVICES_DIR'])
    if not library.is_dir():
        raise ConfigError(f"No existe el directorio de dispositivos: {library}")

    rows = []
    for path in sorted(library.glob('*.json')):
        device_file = load_device(str(path))
        rows.append({
            'file': path.name,
            'name': device_file.name or path.stem,
            'kind': 'three-qubit' if device_file.three_qubit is not None else 'circuit',
            'description': device_file.description,
        })
    return rows
