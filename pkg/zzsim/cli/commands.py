"""
Comandos de la CLI. Cada comando valida sus opciones, carga el archivo de
dispositivo y emite filas en CSV o JSON.
"""
from typing import Any, Callable, Dict, List, Optional

import typer

from ..shared.errors import ZZSimError
from ..shared.files import write_rows
from ..shared.logger import get_logger, start_run
from . import services
from .models import DeviceFile, RunConfig

logger = get_logger(__name__)

app = typer.Typer(
    name='zzsim',
    help='Simulación de interacciones ZZ, resonancia cruzada y canales de gate en qubits superconductores.',
    add_completion=False,
    no_args_is_help=True,
)

RowBuilder = Callable[[DeviceFile, RunConfig], List[Dict[str, Any]]]

DEVICE = typer.Option(..., '--device', '-d', help='Archivo JSON o nombre en la biblioteca de dispositivos')
SWEEP = typer.Option(None, '--sweep', help='Barrido ruta=inicio:fin:puntos')
METHOD = typer.Option(None, '--method', '-m', help='Selector de método del comando')
OUT = typer.Option(None, '--out', '-o', help='Archivo de salida (por defecto stdout)')
FORMAT = typer.Option('csv', '--format', '-f', help='csv o json')
JOBS = typer.Option(None, '--jobs', '-j', help='Hilos de trabajo (0 = todos los CPUs)')
TOL = typer.Option(1e-6, '--tol', help='Tolerancia de la búsqueda de raíces')


def _emit(rows: List[Dict[str, Any]], config: RunConfig) -> None:
    text = write_rows(rows, config.out, config.fmt)
    if config.out is None:
        typer.echo(text, nl=False)


def _fail(error: ZZSimError) -> None:
    logger.error(f"{type(error).__name__}: {error}")
    typer.echo(f"error: {error}", err=True)
    raise typer.Exit(code=error.exit_code)


def _run(command: str, build: RowBuilder, device: str, **options: Any) -> None:
    """Valida las opciones, carga el dispositivo, arma las filas y las emite"""
    start_run(command)
    try:
        config = services.build_config(command, device, **options)
        device_file = services.load_device(config.device)
        rows = build(device_file, config)
        _emit(rows, config)
        logger.info(f"Command {command} finished with {len(rows)} rows")
    except ZZSimError as e:
        _fail(e)


@app.command('spectrum')
def spectrum(
    device: str = DEVICE,
    sweep: Optional[str] = SWEEP,
    out: Optional[str] = OUT,
    fmt: str = FORMAT,
    jobs: Optional[int] = JOBS,
):
    """
    Frecuencia, anarmonicidad y escalera de niveles de cada elemento.
    """
    _run('spectrum', services.spectrum_rows, device, sweep=sweep, out=out, fmt=fmt, jobs=jobs)


@app.command('static-zz')
def static_zz(
    device: str = DEVICE,
    sweep: Optional[str] = SWEEP,
    method: Optional[str] = METHOD,
    out: Optional[str] = OUT,
    fmt: str = FORMAT,
    jobs: Optional[int] = JOBS,
    tol: float = TOL,
):
    """
    ZZ estático exacto, SW y de cuarto orden; con barrido agrega las raíces
    del método elegido (exact, effective, sw o pt4).
    """
    _run('static-zz', services.static_zz_rows, device,
         sweep=sweep, method=method, out=out, fmt=fmt, jobs=jobs, tol=tol)


@app.command('cr')
def cr(
    device: str = DEVICE,
    sweep: Optional[str] = SWEEP,
    method: Optional[str] = METHOD,
    out: Optional[str] = OUT,
    fmt: str = FORMAT,
    jobs: Optional[int] = JOBS,
):
    """
    Coeficientes de resonancia cruzada en función de Ω y amplitud de
    cancelación Ω* (la, on, closed o all).
    """
    _run('cr', services.cr_rows, device, sweep=sweep, method=method, out=out, fmt=fmt, jobs=jobs)


@app.command('gate-error')
def gate_error(
    device: str = DEVICE,
    sweep: Optional[str] = SWEEP,
    gate_length: Optional[float] = typer.Option(None, '--gate-length', help='Duración total del gate (ns) en barridos de flujo'),
    convention: str = typer.Option('square', '--convention', help='square (2τ + 80 ns) o gaussian (2τ + 160 ns)'),
    out: Optional[str] = OUT,
    fmt: str = FORMAT,
    jobs: Optional[int] = JOBS,
):
    """
    Error del ZX90 eco a lo largo de la duración del gate o del flujo del control.
    """
    def build(device_file: DeviceFile, config: RunConfig) -> List[Dict[str, Any]]:
        return services.gate_error_rows(device_file, config, gate_length, convention)

    _run('gate-error', build, device, sweep=sweep, out=out, fmt=fmt, jobs=jobs)


@app.command('three-qubit')
def three_qubit(
    device: str = DEVICE,
    method: Optional[str] = METHOD,
    out: Optional[str] = OUT,
    fmt: str = FORMAT,
    jobs: Optional[int] = JOBS,
):
    """
    Coeficientes ZII…ZZZ del modelo de tres qubits por cada método.
    """
    _run('three-qubit', services.three_qubit_rows, device, method=method, out=out, fmt=fmt, jobs=jobs)


@app.command('cz')
def cz(
    device: str = DEVICE,
    sweep: Optional[str] = SWEEP,
    out: Optional[str] = OUT,
    fmt: str = FORMAT,
    jobs: Optional[int] = JOBS,
):
    """
    Duración del gate CZ con pulso tanh y brecha mínima del par de estados.
    """
    _run('cz', services.cz_rows, device, sweep=sweep, out=out, fmt=fmt, jobs=jobs)


@app.command('devices')
def devices(
    directory: Optional[str] = typer.Option(None, '--dir', help='Directorio de la biblioteca (por defecto DEVICES_DIR)'),
    fmt: str = FORMAT,
):
    """
    Lista los archivos de la biblioteca de dispositivos.
    """
    try:
        typer.echo(write_rows(services.device_catalog(directory), None, fmt), nl=False)
    except ZZSimError as e:
        _fail(e)
