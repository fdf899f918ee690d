import os

from .cli import app
from .shared.env import env
from .shared.logger import get_logger

logger = get_logger(__name__)

cpu_available = os.cpu_count() or 1


@app.callback()
def startup():
    """Simulador de ZZ estático y dinámico, resonancia cruzada y canales de gate"""
    logger.info(f"zzsim starting (devices={env['DEVICES_DIR']}, cpus={cpu_available})")


def main():
    """Punto de entrada del ejecutable `zzsim`"""
    app(prog_name='zzsim')


if __name__ == '__main__':
    main()
