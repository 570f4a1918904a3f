"""Complex amplitude vector tagged with its basis; the unit of all evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import SectorBasis


@dataclass
class QuantumState:
    basis: SectorBasis
    amps: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {self.amps.shape}, "
                f"basis dimension is {self.basis.dim}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "QuantumState":
        return QuantumState(self.basis, self.amps / self.norm(), self.t)

    def copy(self) -> "QuantumState":
        return QuantumState(self.basis, self.amps.copy(), self.t)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def overlap(self, other: "QuantumState") -> complex:
        return complex(np.vdot(self.amps, other.amps))
