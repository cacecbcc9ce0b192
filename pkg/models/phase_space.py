from dataclasses import dataclass
from typing import Dict, List

import numpy as np


@dataclass(frozen=True)
class WeylIndex:
    """A point (a, a') of the discrete phase space Z_n x Z_n."""
    a: int
    a_prime: int

    def reduced(self, n: int) -> "WeylIndex":
        return WeylIndex(self.a % n, self.a_prime % n)

    def to_dict(self):
        return {"a": self.a, "a_prime": self.a_prime}


@dataclass
class DensityMatrix:
    """Dense n x n complex matrix standing for a qudit state.

    Invariants (Hermiticity, unit trace, positivity) are checked by
    services.state_validator, not on construction, so that intermediate
    reconstructions can be represented too.
    """
    dim: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match dim {self.dim}"
            )

    @classmethod
    def from_matrix(cls, matrix) -> "DensityMatrix":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(dim=matrix.shape[0], entries=matrix)

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        vector = np.asarray(vector, dtype=complex)
        vector = vector / np.linalg.norm(vector)
        return cls.from_matrix(np.outer(vector, vector.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(dim=dim, entries=np.eye(dim, dtype=complex) / dim)

    def to_dict(self) -> Dict:
        return {
            "dim": self.dim,
            "entries": [
                [[float(z.real), float(z.imag)] for z in row]
                for row in self.entries
            ],
        }


@dataclass
class WignerMap:
    """Real quasi-probabilities W[a, a'] over the n x n phase-space grid."""
    dim: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.dim, self.dim):
            raise ValueError(
                f"values shape {self.values.shape} does not match dim {self.dim}"
            )

    def __getitem__(self, idx: WeylIndex) -> float:
        idx = idx.reduced(self.dim)
        return float(self.values[idx.a, idx.a_prime])

    def negative_mass(self) -> float:
        return float(-self.values[self.values < 0].sum())

    def to_dict(self) -> Dict[str, List]:
        return {"dim": self.dim, "values": self.values.tolist()}
