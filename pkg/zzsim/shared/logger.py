"""
Configuración centralizada de logging para el simulador.

Cada ejecución de la CLI escribe en su propio archivo
`<comando>_YYYY_MM_DD.log` dentro de LOGS_DIR; los registros emitidos antes
de iniciar una ejecución van a `zzsim_YYYY_MM_DD.log`.
"""
import logging
from datetime import datetime
from logging import Handler
from pathlib import Path
from typing import Optional

from .env import env

DEFAULT_RUN = 'zzsim'


class RunLogHandler(Handler):
    """Handler que escribe en un archivo por ejecución y día"""

    def __init__(self, logs_dir: Path, level=logging.NOTSET):
        super().__init__(level)
        self.logs_dir = logs_dir
        self.run = DEFAULT_RUN
        self.current_path: Optional[Path] = None
        self.current_handler: Optional[logging.FileHandler] = None
        self.addFilter(self._tag)

    def _tag(self, record: logging.LogRecord) -> bool:
        record.run = self.run
        return True

    def log_path(self) -> Path:
        """Archivo de la ejecución en curso para el día de hoy"""
        return self.logs_dir / f"{self.run}_{datetime.now():%Y_%m_%d}.log"

    def start_run(self, run: str) -> Path:
        """
        Dirige los registros siguientes al archivo de la ejecución `run`.

        Args:
            run: Nombre de la ejecución (el comando de la CLI)

        Returns:
            Ruta del archivo de log de la ejecución
        """
        self.acquire()
        try:
            self._close_current()
            self.run = run
        finally:
            self.release()
        return self.log_path()

    def emit(self, record):
        """Emite el log al archivo de la ejecución; se reabre al cambiar de día"""
        path = self.log_path()
        if path != self.current_path:
            self._close_current()
            self.logs_dir.mkdir(parents=True, exist_ok=True)
            self.current_handler = logging.FileHandler(path, mode='a', encoding='utf-8')
            self.current_handler.setFormatter(self.formatter)
            self.current_path = path

        self.current_handler.emit(record)

    def _close_current(self) -> None:
        if self.current_handler:
            self.current_handler.close()
        self.current_handler = None
        self.current_path = None

    def close(self):
        """Cierra el archivo abierto"""
        self._close_current()
        super().close()


LOG_FORMAT = '%(asctime)s - %(run)s - %(name)s - %(levelname)s - %(message)s'

logs_dir = Path(env['LOGS_DIR'])

log_level = getattr(logging, env['LOG_LEVEL'].upper())

run_handler = RunLogHandler(logs_dir)
run_handler.setLevel(log_level)
run_handler.setFormatter(logging.Formatter(LOG_FORMAT))

logging.basicConfig(
    level=log_level,
    handlers=[
        run_handler
    ],
    force=True
)


def start_run(run: str) -> Path:
    """
    Inicia el log de una ejecución de la CLI.

    Args:
        run: Nombre del comando

    Returns:
        Ruta del archivo de log de la ejecución
    """
    path = run_handler.start_run(run)
    logging.getLogger(__name__).debug(f"Logging run {run} to {path}")
    return path


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Obtiene un logger configurado para el simulador.

    Args:
        name: Nombre del logger (típicamente __name__ del módulo)

    Returns:
        Logger con el nivel especificado en la configuración
    """
    return logging.getLogger(name)
