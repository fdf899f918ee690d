"""
Operadores de escalera, colocación en producto tensorial y matrices de Pauli.
"""
from functools import reduce
from itertools import product
from typing import Dict, List, Sequence

import numpy as np

PAULI = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}


def annihilation(dim: int) -> np.ndarray:
    """Operador de aniquilación truncado a `dim` niveles"""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def number(dim: int) -> np.ndarray:
    """Operador número truncado a `dim` niveles"""
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def embed(op: np.ndarray, index: int, dims: Sequence[int]) -> np.ndarray:
    """
    Coloca un operador local en el espacio producto.

    Args:
        op: Operador sobre el subsistema `index`
        index: Posición del subsistema
        dims: Dimensiones de todos los subsistemas, en orden de declaración

    Returns:
        Operador sobre el espacio completo (orden row-major)
    """
    factors = [op if k == index else np.eye(d, dtype=complex) for k, d in enumerate(dims)]
    return reduce(np.kron, factors)


def basis_labels(dims: Sequence[int]) -> List[tuple]:
    """Multi-índices de la base producto en orden row-major"""
    return list(product(*[range(d) for d in dims]))


def pauli_string(label: str) -> np.ndarray:
    """Matriz de una cadena de Pauli como 'ZX' o 'ZZI'"""
    return reduce(np.kron, [PAULI[c] for c in label])


def pauli_labels(n_qubits: int) -> List[str]:
    """Todas las cadenas de Pauli de `n_qubits` en orden lexicográfico IXYZ"""
    return [''.join(p) for p in product('IXYZ', repeat=n_qubits)]


def pauli_basis(n_qubits: int) -> Dict[str, np.ndarray]:
    """Diccionario etiqueta -> matriz para todas las cadenas de Pauli"""
    return {label: pauli_string(label) for label in pauli_labels(n_qubits)}


def pauli_weight(label: str) -> int:
    """Número de factores distintos de la identidad"""
    return sum(c != 'I' for c in label)
