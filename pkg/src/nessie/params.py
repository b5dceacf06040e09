"""Parameter records for the two-qubit system and its reservoirs.

Units: hbar = k_B = 1 throughout; energies, temperatures and chemical
potentials share one energy unit (conventionally the mean qubit frequency).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Statistics(Enum):
    BOSON = "boson"
    FERMION = "fermion"


@dataclass(frozen=True)
class SystemParams:
    """Two qubit frequencies and the inter-qubit exchange coupling."""

    eps1: float
    eps2: float
    kappa: float

    def __post_init__(self):
        if not self.eps1 > 0:
            raise ValueError(f"eps1 must be positive, got {self.eps1}")
        if not self.eps2 > 0:
            raise ValueError(f"eps2 must be positive, got {self.eps2}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @property
    def eps_bar(self) -> float:
        """Mean qubit frequency (eps1 + eps2)/2."""
        return 0.5 * (self.eps1 + self.eps2)

    @property
    def delta_eps(self) -> float:
        """Detuning eps2 - eps1."""
        return self.eps2 - self.eps1

    @property
    def omega(self) -> float:
        """Half splitting of the single-excitation doublet."""
        return 0.5 * math.hypot(self.delta_eps, self.kappa)


@dataclass(frozen=True)
class BathSpec:
    """One reservoir: statistics, temperature, chemical potential, coupling.

    ``gamma`` is the flat-spectrum system-bath coupling constant (the same
    value is used at both transition frequencies).  Bosonic reservoirs
    exchange energy only and must have ``mu = 0``.
    """

    statistics: Statistics
    T: float
    gamma: float
    mu: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.statistics is Statistics.BOSON and self.mu != 0.0:
            raise ValueError(
                f"bosonic reservoirs have zero chemical potential, got mu={self.mu}"
            )
