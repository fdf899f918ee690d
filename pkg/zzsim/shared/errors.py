"""
Jerarquía de excepciones del simulador.

Los errores de configuración terminan la CLI con código 1 y los errores de
dominio numérico con código 2.
"""


class ZZSimError(Exception):
    """Error base del simulador"""
    exit_code = 1


class ConfigError(ZZSimError, ValueError):
    """Archivo de dispositivo, opción o parámetro inválido"""
    exit_code = 1


class NumericalDomainError(ZZSimError):
    """El cálculo salió del dominio de validez del modelo"""
    exit_code = 2


class TruncationError(NumericalDomainError):
    """La base truncada no converge"""


class DispersiveViolationError(NumericalDomainError):
    """El acoplamiento no es pequeño frente a la desintonía"""


class DegenerateAssignmentError(NumericalDomainError):
    """No se pudo asignar autovectores a bloques o etiquetas"""


class NoFiniteSolutionError(NumericalDomainError):
    """La ecuación no tiene solución finita"""


class PoleProximityError(NumericalDomainError):
    """El punto está demasiado cerca de un polo de la fórmula perturbativa"""


class InfeasibleGateLengthError(NumericalDomainError):
    """La tasa ZX requerida excede la máxima alcanzable"""

    def __init__(self, message: str, min_gate_length: float):
        super().__init__(message)
        self.min_gate_length = min_gate_length


class DomainError(NumericalDomainError):
    """Argumento fuera del dominio de una fórmula"""


class RejectedPathError(NumericalDomainError):
    """La trayectoria de flujo cruza un polo del ajuste ZZ"""
