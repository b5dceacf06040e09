"""Bloch-Redfield generator for the two-qubit system, with cross terms.

The generator acts on column-stacked density matrices:
vec(rho) = rho.flatten(order="F"), so vec(A rho B) = kron(B.T, A) vec(rho).
All superoperators are 16x16 complex matrices in the energy basis.

The dissipator of reservoir j groups into four rate channels, absorption
and emission at each of the two transition frequencies.  Each channel
carries the same-frequency sandwich term plus the cross terms that couple
the population and coherence sectors; dropping the cross terms
(``cross_terms=False``) recovers the secular / Lindblad form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .eigensystem import CouplingRegime, EigenSystem, build_eigensystem
from .errors import MixedStatistics, NonPositiveBosonFrequency
from .params import BathSpec, Statistics, SystemParams

_I4 = np.eye(4, dtype=complex)

#: warn when the system-bath coupling is no longer clearly weak
WEAK_COUPLING_WARN_FRACTION = 0.3


def occupation(b: BathSpec, omega: float) -> float:
    """Mean reservoir occupation at frequency omega.

    Bose-Einstein 1/(exp(omega/T) - 1) for bosons (omega must be positive),
    Fermi-Dirac 1/(exp((omega - mu)/T) + 1) for fermions.
    """
    if b.statistics is Statistics.BOSON:
        if omega <= 0:
            raise NonPositiveBosonFrequency(
                f"Bose occupation needs omega > 0, got {omega}"
            )
        x = omega / b.T
        if x > 700.0:
            return 0.0
        return 1.0 / math.expm1(x)
    return float(expit(-(omega - b.mu) / b.T))


@dataclass(frozen=True)
class Rates:
    """Absorption (alpha) and emission (beta) rates at the two frequencies."""

    alpha_minus: float
    alpha_plus: float
    beta_minus: float
    beta_plus: float


def transition_rates(b: BathSpec, es: EigenSystem) -> Rates:
    """Evaluate alpha = gamma*n and beta = gamma*(1 +/- n) at eps_-, eps_+."""
    sign = 1.0 if b.statistics is Statistics.BOSON else -1.0
    n_minus = occupation(b, es.eps_minus)
    n_plus = occupation(b, es.eps_plus)
    return Rates(
        alpha_minus=b.gamma * n_minus,
        alpha_plus=b.gamma * n_plus,
        beta_minus=b.gamma * (1.0 + sign * n_minus),
        beta_plus=b.gamma * (1.0 + sign * n_plus),
    )


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec` for 4x4 matrices."""
    return np.asarray(v, dtype=complex).reshape((4, 4), order="F")


def _sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> A rho B."""
    return np.kron(b.T, a)


def _left(x: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> X rho."""
    return np.kron(_I4, x)


def _right(x: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> rho X."""
    return np.kron(x.T, _I4)


def _channel(rate, sandwiches, drifts) -> np.ndarray:
    """One rate channel: sum of A rho B sandwiches minus X rho drifts, + h.c.

    The Hermitian conjugate of rho -> A rho B is rho -> B^dag rho A^dag, and
    of rho -> X rho is rho -> rho X^dag.
    """
    out = np.zeros((16, 16), dtype=complex)
    for a, b in sandwiches:
        out += _sandwich(a, b) + _sandwich(b.conj().T, a.conj().T)
    for x in drifts:
        out -= _left(x) + _right(x.conj().T)
    return rate * out


def build_dissipator(
    b: BathSpec, es: EigenSystem, j: int, cross_terms: bool = True
) -> np.ndarray:
    """Dissipator superoperator of reservoir j (1 or 2), energy basis.

    Channel structure, with eta/xi the lowering operators of qubit j at the
    frequencies eps_-/eps_+ and alpha/beta the absorption/emission rates:

        alpha(eps_-): eta'rho eta + eta'rho xi - eta eta'rho - xi eta'rho + h.c.
        alpha(eps_+): xi'rho xi  + eta'rho xi  - xi xi'rho  - eta xi'rho  + h.c.
        beta(eps_-):  eta rho eta' + eta rho xi' - eta'eta rho - xi'eta rho + h.c.
        beta(eps_+):  xi rho xi'   + eta rho xi' - xi'xi rho   - eta'xi rho + h.c.

    (' marks the adjoint).  The second sandwich and second drift of every
    channel are the cross terms; note the same cross sandwich appears under
    both frequencies of a channel pair — this asymmetric placement is
    deliberate and is what keeps the equilibrium state stationary.
    """
    if j not in (1, 2):
        raise ValueError(f"bath index must be 1 or 2, got {j}")
    if b.statistics is Statistics.BOSON and es.eps_minus <= 0:
        # eps_- > 0 is equivalent to being strictly inside either regime.
        raise NonPositiveBosonFrequency(
            f"eps_minus={es.eps_minus} must be positive for bosonic reservoirs"
        )
    eta = es.eta[j - 1]
    xi = es.xi[j - 1]
    etad = eta.conj().T
    xid = xi.conj().T
    r = transition_rates(b, es)

    if cross_terms:
        d = (
            _channel(r.alpha_minus, [(etad, eta), (etad, xi)], [eta @ etad, xi @ etad])
            + _channel(r.alpha_plus, [(xid, xi), (etad, xi)], [xi @ xid, eta @ xid])
            + _channel(r.beta_minus, [(eta, etad), (eta, xid)], [etad @ eta, xid @ eta])
            + _channel(r.beta_plus, [(xi, xid), (eta, xid)], [xid @ xi, etad @ xi])
        )
    else:
        d = (
            _channel(r.alpha_minus, [(etad, eta)], [eta @ etad])
            + _channel(r.alpha_plus, [(xid, xi)], [xi @ xid])
            + _channel(r.beta_minus, [(eta, etad)], [etad @ eta])
            + _channel(r.beta_plus, [(xi, xid)], [xid @ xi])
        )
    return d


@dataclass(frozen=True)
class Liouvillian:
    """Full generator: coherent part plus both dissipators.

    ``matrix`` acts on column-stacked energy-basis density matrices.
    """

    matrix: np.ndarray                      # 16x16
    eigensystem: EigenSystem
    baths: tuple[BathSpec, BathSpec]
    dissipators: tuple[np.ndarray, np.ndarray]
    basis: str = "energy"
    vectorization: str = "column"


def build_liouvillian(
    p: SystemParams, b1: BathSpec, b2: BathSpec, cross_terms: bool = True
) -> Liouvillian:
    """Assemble the 16x16 generator for the given system and reservoir pair.

    Raises
    ------
    MixedStatistics
        If the reservoirs carry different statistics flags; mixed
        boson/fermion configurations are not modeled.
    """
    if b1.statistics is not b2.statistics:
        raise MixedStatistics(
            f"baths must share statistics, got {b1.statistics} and {b2.statistics}"
        )
    es = build_eigensystem(p)
    if b1.statistics is Statistics.FERMION and es.regime is CouplingRegime.STRONG:
        # the particle-conserving hopping picture behind the fermionic rates
        # breaks down here (the N-raising transition lowers the energy), so
        # the grand-canonical state is no longer stationary
        warnings.warn(
            "fermionic reservoirs with strong inter-qubit coupling "
            "(kappa > 2*sqrt(eps1*eps2)) are outside the model's validity",
            stacklevel=2,
        )
    eps_min = min(p.eps1, p.eps2)
    for idx, b in ((1, b1), (2, b2)):
        if b.gamma > WEAK_COUPLING_WARN_FRACTION * eps_min:
            warnings.warn(
                f"gamma{idx}={b.gamma} exceeds {WEAK_COUPLING_WARN_FRACTION}*min(eps1,eps2)"
                f"={WEAK_COUPLING_WARN_FRACTION * eps_min}; weak-coupling treatment "
                "may be inaccurate",
                stacklevel=2,
            )

    h = es.hamiltonian_energy
    commutator = -1j * (_left(h) - _right(h))
    d1 = build_dissipator(b1, es, 1, cross_terms=cross_terms)
    d2 = build_dissipator(b2, es, 2, cross_terms=cross_terms)
    return Liouvillian(
        matrix=commutator + d1 + d2,
        eigensystem=es,
        baths=(b1, b2),
        dissipators=(d1, d2),
    )


def apply_dissipator(L: Liouvillian, j: int, rho_energy: np.ndarray) -> np.ndarray:
    """Action of the j-th dissipator on an energy-basis density matrix."""
    if j not in (1, 2):
        raise ValueError(f"bath index must be 1 or 2, got {j}")
    return unvec(L.dissipators[j - 1] @ vec(rho_energy))
