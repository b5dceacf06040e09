"""Steady-state solution of the generator, plus a propagation oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .eigensystem import EigenSystem, to_local_basis
from .errors import DegenerateSteadyState, NonPhysical, StepFailure
from .liouvillian import Liouvillian, unvec, vec
from .params import Statistics

#: second singular value below this fraction of the largest flags a
#: multi-dimensional null space
KERNEL_DEGENERACY_RTOL = 1e-10

#: eigenvalues below this are a solver failure, not numerical noise
NEGATIVITY_HARD_LIMIT = 1e-6

#: number operator of the two-qubit system in the energy basis
NUMBER_DIAG = np.array([0.0, 1.0, 1.0, 2.0])

#: indices of local-basis entries outside the X pattern (upper triangle)
_OFF_X = [(0, 1), (0, 2), (1, 3), (2, 3)]


@dataclass(frozen=True)
class SteadyState:
    """Solved steady state in both bases, with solver diagnostics.

    ``negativity`` is the magnitude of the most negative eigenvalue found
    before clipping (the weak-coupling generator is not guaranteed
    completely positive, so tiny negativity is recorded, never hidden).
    ``x_violation`` is the largest local-basis entry outside the X pattern.
    """

    rho_energy: np.ndarray
    rho_local: np.ndarray
    residual: float
    kernel_dim: int
    negativity: float
    x_violation: float


def solve_steady_state(L: Liouvillian) -> SteadyState:
    """Unique trace-one null vector of the generator.

    Extracts the kernel by SVD, Hermitizes, normalizes the trace, and clips
    eigenvalues in [-1e-6, 0) to zero with renormalization.

    Raises
    ------
    DegenerateSteadyState
        If the second-smallest singular value is below 1e-10 of the largest.
    NonPhysical
        If the normalized state has an eigenvalue below -1e-6.
    """
    m = L.matrix
    _, s, vh = np.linalg.svd(m)
    kernel_dim = int(np.count_nonzero(s <= KERNEL_DEGENERACY_RTOL * s[0]))
    if s[-2] <= KERNEL_DEGENERACY_RTOL * s[0]:
        raise DegenerateSteadyState(
            f"null space dimension {max(kernel_dim, 2)}: sigma={s[-2]:.3e} vs max {s[0]:.3e}"
        )
    kernel_dim = max(kernel_dim, 1)

    rho = unvec(vh[-1].conj())
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise DegenerateSteadyState("kernel vector is traceless")
    rho = rho / tr

    evals, evecs = np.linalg.eigh(rho)
    negativity = float(max(0.0, -evals.min()))
    if evals.min() < -NEGATIVITY_HARD_LIMIT:
        raise NonPhysical(f"steady state has eigenvalue {evals.min():.3e}")
    if evals.min() < 0.0:
        evals = np.clip(evals, 0.0, None)
        rho = (evecs * evals) @ evecs.conj().T
        rho = rho / np.trace(rho).real

    residual = float(np.linalg.norm(m @ vec(rho)))
    rho_local = to_local_basis(L.eigensystem, rho)
    x_violation = float(max(abs(rho_local[i, j]) for i, j in _OFF_X))
    return SteadyState(
        rho_energy=rho,
        rho_local=rho_local,
        residual=residual,
        kernel_dim=kernel_dim,
        negativity=negativity,
        x_violation=x_violation,
    )


def propagate(L: Liouvillian, rho0: np.ndarray, t: float) -> np.ndarray:
    """Evolve an energy-basis density matrix for time t via expm(L t).

    Serves as the independent oracle for :func:`solve_steady_state`; the
    matrix exponential uses scaling-and-squaring.

    Raises
    ------
    StepFailure
        If the propagated trace deviates from the initial trace by > 1e-10.
    """
    v = scipy.linalg.expm(L.matrix * t) @ vec(rho0)
    rho = unvec(v)
    tr0 = np.trace(rho0)
    if abs(np.trace(rho) - tr0) > 1e-10:
        raise StepFailure(
            f"trace drifted by {abs(np.trace(rho) - tr0):.3e} over t={t}"
        )
    return rho


def gibbs_state(es: EigenSystem, T: float, mu: float = 0.0) -> np.ndarray:
    """Grand-canonical thermal state exp(-(H - mu N)/T)/Z, energy basis.

    N counts excitations: diag(0, 1, 1, 2) in the energy basis.  Pass
    mu = 0 for bosonic reservoirs.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    w = -(es.energies - mu * NUMBER_DIAG) / T
    w = w - w.max()
    p = np.exp(w)
    p /= p.sum()
    return np.diag(p).astype(complex)


def equilibrium_steady_state(L: Liouvillian) -> np.ndarray:
    """Analytic steady state when both reservoirs are at equal T and mu."""
    b1, b2 = L.baths
    if b1.T != b2.T or b1.mu != b2.mu:
        raise ValueError("reservoirs are not at a common equilibrium")
    mu = 0.0 if b1.statistics is Statistics.BOSON else b1.mu
    return gibbs_state(L.eigensystem, b1.T, mu)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance 0.5*||a - b||_1 between two density matrices."""
    diff = np.asarray(a) - np.asarray(b)
    evals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.abs(evals).sum())
