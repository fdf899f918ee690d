"""
Configuración de la aplicación leída desde `.env` con valores por defecto.
"""
from dotenv import dotenv_values

defaults = {
    'LOG_LEVEL': 'INFO',
    'LOGS_DIR': 'logs',
    'DEVICES_DIR': 'devices',
    'MAX_HILBERT_DIM': '100000',
    'DEFAULT_JOBS': '0',
    'OUTPUT_SIG_DIGITS': '9',
}

env = {**defaults, **{k: v for k, v in dotenv_values('.env').items() if v is not None}}

integer_vars = [
    'MAX_HILBERT_DIM',
    'DEFAULT_JOBS',
    'OUTPUT_SIG_DIGITS',
]

valid_log_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']

if env['LOG_LEVEL'].upper() not in valid_log_levels:
    log_levels = ', '.join(valid_log_levels)
    received_level = env['LOG_LEVEL']
    raise ValueError(f'LOG_LEVEL debe ser uno de {log_levels}, se recibió: {received_level}')

for var in env:
    if not str(env[var]).strip():
        raise ValueError(f'La variable de entorno no puede estar vacía: {var}')

for var in integer_vars:
    try:
        value = int(env[var])
    except ValueError:
        raise ValueError(f'No es un entero válido: {var}={env[var]}')
    if value < 0:
        raise ValueError(f'La variable {var} no puede ser negativa: {env[var]}')


def get_int(name: str) -> int:
    """
    Obtiene una variable de configuración entera.

    Args:
        name: Nombre de la variable

    Returns:
        Valor entero de la variable
    """
    return int(env[name])
