"""
Interfaz de línea de comandos.
"""
from .commands import app

__all__ = ['app']
