"""
Utilidades para lectura de archivos de dispositivo y escritura de resultados.
"""
import json
import math
import os
from typing import Any, Dict, List, Optional

import pandas as pd

from .env import get_int
from .errors import ConfigError
from .logger import get_logger

logger = get_logger(__name__)


def read_text_file(file_path: str, encoding: str = 'utf-8') -> str:
    """
    Lee un archivo de texto y retorna su contenido como string.

    Args:
        file_path: Ruta al archivo a leer
        encoding: Codificación del archivo (default: 'utf-8')

    Returns:
        Contenido del archivo como string

    Raises:
        ConfigError: Si el archivo no existe o no se puede leer
    """
    if not os.path.exists(file_path):
        logger.error(f"File not found: {file_path}")
        raise ConfigError(f"El archivo no existe: {file_path}")

    try:
        with open(file_path, 'r', encoding=encoding) as f:
            return f.read()
    except (UnicodeDecodeError, IOError) as e:
        logger.error(f"Error reading {file_path}: {e}")
        raise ConfigError(f"No se pudo leer el archivo {file_path}: {e}") from e


def read_json_file(file_path: str) -> Dict[str, Any]:
    """
    Lee un documento JSON cuyo nivel superior es un objeto.

    Args:
        file_path: Ruta al archivo JSON

    Returns:
        Diccionario con el contenido del documento

    Raises:
        ConfigError: Si el archivo no es JSON válido o no es un objeto
    """
    content = read_text_file(file_path)
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {file_path}: {e}")
        raise ConfigError(f"JSON inválido en {file_path} (línea {e.lineno}): {e.msg}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"El documento {file_path} debe ser un objeto JSON")
    return data


def round_significant(value: Any, digits: Optional[int] = None) -> Any:
    """
    Redondea un flotante a un número fijo de cifras significativas.

    Args:
        value: Valor a redondear (los no flotantes se devuelven sin cambios)
        digits: Cifras significativas (default: OUTPUT_SIG_DIGITS)

    Returns:
        Valor redondeado
    """
    if digits is None:
        digits = get_int('OUTPUT_SIG_DIGITS')
    if isinstance(value, bool) or not isinstance(value, float):
        return value
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def format_rows(rows: List[Dict[str, Any]], fmt: str = 'csv', digits: Optional[int] = None) -> str:
    """
    Serializa filas de resultados a CSV o JSON con formato determinista.

    Args:
        rows: Filas como diccionarios con las mismas claves
        fmt: 'csv' o 'json'
        digits: Cifras significativas (default: OUTPUT_SIG_DIGITS)

    Returns:
        Texto serializado

    Raises:
        ConfigError: Si el formato no es soportado
    """
    if digits is None:
        digits = get_int('OUTPUT_SIG_DIGITS')

    rounded = [{k: round_significant(v, digits) for k, v in row.items()} for row in rows]
    frame = pd.DataFrame.from_records(rounded)

    if fmt == 'csv':
        return frame.to_csv(index=False, float_format=f'%.{digits}g', lineterminator='\n')
    if fmt == 'json':
        return frame.to_json(orient='records', indent=2, double_precision=15) + '\n'

    raise ConfigError(f"Formato de salida no soportado: {fmt}")


def write_rows(rows: List[Dict[str, Any]], out_path: Optional[str], fmt: str = 'csv') -> str:
    """
    Escribe filas de resultados en disco o las retorna para salida estándar.

    Args:
        rows: Filas de resultados
        out_path: Ruta de salida (None para no escribir)
        fmt: 'csv' o 'json'

    Returns:
        Texto serializado

    Raises:
        ConfigError: Si hay problemas al escribir el archivo
    """
    text = format_rows(rows, fmt)
    if out_path is None:
        return text

    try:
        directory = os.path.dirname(out_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out_path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logger.info(f"Wrote {len(rows)} rows to {out_path}")
        return text
    except IOError as e:
        logger.error(f"IO error writing {out_path}: {e}")
        raise ConfigError(f"No se pudo escribir {out_path}: {e}") from e
