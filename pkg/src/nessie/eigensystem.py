"""Spectrum and transition operators of the coupled two-qubit Hamiltonian.

Local product basis is ordered |00>, |01>, |10>, |11> with |0> the
sigma_z = -1 state of each qubit and sigma^+ = |1><0|.  The energy basis
is ordered by the labels |1>..|4>, i.e. [-eps_bar, -Omega, +Omega, +eps_bar],
NOT by energy: for strong coupling (kappa > 2 sqrt(eps1 eps2)) the ordering
by energy is E2 < E1 < E4 < E3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateCoupling
from .params import SystemParams

#: relative tolerance around the regime boundary kappa = 2 sqrt(eps1 eps2)
REGIME_BOUNDARY_RTOL = 1e-9


class CouplingRegime(Enum):
    WEAK = "weak"      # kappa < 2 sqrt(eps1 eps2): product ground state
    STRONG = "strong"  # kappa > 2 sqrt(eps1 eps2): entangled ground state


def build_hamiltonian(p: SystemParams) -> np.ndarray:
    """Two-qubit Hamiltonian in the local product basis.

    H = eps1/2 sigma_z(1) + eps2/2 sigma_z(2)
        + kappa/2 (sigma^+(1) sigma^-(2) + sigma^-(1) sigma^+(2))
    """
    de = p.delta_eps
    k = p.kappa
    eb = p.eps_bar
    return np.array(
        [
            [-eb, 0.0, 0.0, 0.0],
            [0.0, de / 2, k / 2, 0.0],
            [0.0, k / 2, -de / 2, 0.0],
            [0.0, 0.0, 0.0, eb],
        ],
        dtype=complex,
    )


def detuning_angle(p: SystemParams) -> float:
    """Mixing angle theta in (0, pi/2) of the single-excitation doublet.

    Branches on the sign of the detuning; the symmetric point delta_eps = 0
    is the continuity value pi/4 (both one-sided limits agree).
    """
    de = p.delta_eps
    if de < 0:
        return 0.5 * math.atan(-p.kappa / de)
    if de > 0:
        return 0.5 * math.atan(-p.kappa / de) + math.pi / 2
    return math.pi / 4


def _ketbra(a: int, b: int) -> np.ndarray:
    """|a><b| on the 4-level energy basis, 1-based labels."""
    m = np.zeros((4, 4), dtype=complex)
    m[a - 1, b - 1] = 1.0
    return m


@dataclass(frozen=True)
class EigenSystem:
    """Spectrum, eigenbasis and regime-dependent transition operators."""

    params: SystemParams
    energies: np.ndarray          # [E1, E2, E3, E4] = [-eps_bar, -Omega, Omega, eps_bar]
    theta: float
    eps_plus: float               # larger transition frequency
    eps_minus: float              # smaller transition frequency
    regime: CouplingRegime
    eta: tuple[np.ndarray, np.ndarray]   # lowering operators at eps_minus, per qubit
    xi: tuple[np.ndarray, np.ndarray]    # lowering operators at eps_plus, per qubit
    local_to_energy: np.ndarray   # unitary U, columns are eigenstates; rho_local = U rho_energy U^dag

    @property
    def hamiltonian_energy(self) -> np.ndarray:
        """Hamiltonian in its own eigenbasis: diag(E1..E4)."""
        return np.diag(self.energies).astype(complex)


def build_eigensystem(p: SystemParams) -> EigenSystem:
    """Diagonalize the two-qubit Hamiltonian and assemble transition operators.

    Raises
    ------
    DegenerateCoupling
        If kappa sits on the regime boundary 2 sqrt(eps1 eps2) within
        relative tolerance 1e-9; the level ordering and the rotating-wave
        bookkeeping are ill-defined there.
    """
    boundary = 2.0 * math.sqrt(p.eps1 * p.eps2)
    if abs(p.kappa - boundary) <= REGIME_BOUNDARY_RTOL * boundary:
        raise DegenerateCoupling(
            f"kappa={p.kappa} is on the regime boundary 2*sqrt(eps1*eps2)={boundary}"
        )
    regime = CouplingRegime.WEAK if p.kappa < boundary else CouplingRegime.STRONG

    theta = detuning_angle(p)
    s, c = math.sin(theta), math.cos(theta)
    eb, om = p.eps_bar, p.omega
    energies = np.array([-eb, -om, om, eb])

    # Columns: |1>=|00>, |2>=c|01>-s|10>, |3>=s|01>+c|10>, |4>=|11>.
    u = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, s, 0.0],
            [0.0, -s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )

    if regime is CouplingRegime.WEAK:
        eps_plus, eps_minus = eb + om, eb - om
        eta1 = s * (_ketbra(3, 4) - _ketbra(1, 2))
        eta2 = c * (_ketbra(3, 4) + _ketbra(1, 2))
    else:
        eps_plus, eps_minus = om + eb, om - eb
        eta1 = s * (_ketbra(4, 3) - _ketbra(2, 1))
        eta2 = c * (_ketbra(4, 3) + _ketbra(2, 1))
    xi1 = c * (_ketbra(2, 4) + _ketbra(1, 3))
    xi2 = s * (_ketbra(1, 3) - _ketbra(2, 4))

    return EigenSystem(
        params=p,
        energies=energies,
        theta=theta,
        eps_plus=eps_plus,
        eps_minus=eps_minus,
        regime=regime,
        eta=(eta1, eta2),
        xi=(xi1, xi2),
        local_to_energy=u,
    )


def to_local_basis(es: EigenSystem, rho_energy: np.ndarray) -> np.ndarray:
    """Map a density matrix from the energy basis to the local product basis."""
    u = es.local_to_energy
    return u @ rho_energy @ u.conj().T


def to_energy_basis(es: EigenSystem, rho_local: np.ndarray) -> np.ndarray:
    """Map a density matrix from the local product basis to the energy basis."""
    u = es.local_to_energy
    return u.conj().T @ rho_local @ u
