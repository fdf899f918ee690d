"""
Resultados de diagonalización, transformaciones de Schrieffer-Wolff y
descomposición en bloques.
"""
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..shared.operators import pauli_string, pauli_weight

Label = Tuple[int, ...]


class DressedSpectrum(BaseModel):
    """
    Energías vestidas etiquetadas por el estado desnudo de mayor solapamiento.

    `overlaps` guarda |⟨desnudo|vestido⟩| para cada etiqueta.
    """
    model_config = ConfigDict(frozen=True)

    ids: Tuple[str, ...]
    labels: Tuple[Label, ...]
    energies: Tuple[float, ...]
    overlaps: Tuple[float, ...]
    ambiguous: Tuple[Label, ...] = ()

    def _position(self, label: Label) -> int:
        try:
            return self.labels.index(tuple(label))
        except ValueError:
            raise KeyError(f"etiqueta inexistente: {label}")

    def energy(self, label: Label) -> float:
        return self.energies[self._position(label)]

    def overlap(self, label: Label) -> float:
        return self.overlaps[self._position(label)]

    def weak_labels(self, max_excitations: int = 2) -> List[Label]:
        """Etiquetas de pocas excitaciones cuyo solapamiento es menor que 1/√2"""
        return [
            label for label, overlap in zip(self.labels, self.overlaps)
            if sum(label) <= max_excitations and overlap < 1 / np.sqrt(2)
        ]

    @property
    def flagged(self) -> bool:
        return bool(self.weak_labels()) or bool(self.ambiguous)


class DressedFrame(BaseModel):
    """
    Autovectores ordenados por etiqueta: la columna k de `S` es el estado
    vestido asociado al estado desnudo k de la base.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    energies: np.ndarray
    S: np.ndarray

    def to_dressed(self, op: np.ndarray) -> np.ndarray:
        """Expresa un operador de la base desnuda en la base vestida"""
        return self.S.conj().T @ op @ self.S


class EffectiveTwoQubit(BaseModel):
    """Parámetros vestidos del modelo efectivo de dos qubits"""
    model_config = ConfigDict(frozen=True)

    omega1_bar: float
    omega2_bar: float
    delta1_bar: float
    delta2_bar: float
    J: Dict[Tuple[int, int], float]
    max_ratio: float = 0.0

    def j(self, n1: int, n2: int) -> float:
        return self.J[(n1, n2)]

    @property
    def detuning(self) -> float:
        """Δ̄ = ω̄2 − ω̄1"""
        return self.omega2_bar - self.omega1_bar

    @property
    def gamma(self) -> float:
        """γ = J10/J01"""
        return self.J[(1, 0)] / self.J[(0, 1)]


class BlockDecomposition(BaseModel):
    """Transformación unitaria T tal que T†HT es diagonal por bloques"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    T: np.ndarray
    blocks: Tuple[Tuple[int, ...], ...]
    H_BD: np.ndarray
    min_support: float = 1.0

    @property
    def flagged(self) -> bool:
        """Algún autovector tiene menos de la mitad de su peso en su bloque"""
        return self.min_support < 0.5

    def block(self, index: int) -> np.ndarray:
        idx = list(self.blocks[index])
        return self.H_BD[np.ix_(idx, idx)]


class PauliCoefficients(BaseModel):
    """
    Coeficientes α_P con H = Σ α_P·P/2^w, donde w es el número de factores
    distintos de la identidad.
    """
    model_config = ConfigDict(frozen=True)

    n_qubits: int
    coefficients: Dict[str, float]

    def __getitem__(self, label: str) -> float:
        return self.coefficients.get(label, 0.0)

    def reconstruct(self) -> np.ndarray:
        dim = 2 ** self.n_qubits
        H = np.zeros((dim, dim), dtype=complex)
        for label, value in self.coefficients.items():
            H += value * pauli_string(label) / 2 ** pauli_weight(label)
        return H
