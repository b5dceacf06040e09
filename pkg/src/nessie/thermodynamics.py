"""Steady-state currents, entropy production, and rectification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FermionTemperatureMismatch, ZeroCurrent
from .liouvillian import Liouvillian, apply_dissipator, build_liouvillian
from .params import BathSpec, Statistics, SystemParams
from .steady_state import NUMBER_DIAG, solve_steady_state

#: both directed currents below this means rectification is undefined
ZERO_CURRENT_FLOOR = 1e-14


def heat_current(L: Liouvillian, rho_energy: np.ndarray, j: int) -> float:
    """Energy flow from reservoir j into the system, Tr(D_j[rho] H)."""
    d = apply_dissipator(L, j, rho_energy)
    return float(np.sum(np.diag(d).real * L.eigensystem.energies))


def particle_current(L: Liouvillian, rho_energy: np.ndarray, j: int) -> float:
    """Particle flow from reservoir j into the system, Tr(D_j[rho] N)."""
    d = apply_dissipator(L, j, rho_energy)
    return float(np.sum(np.diag(d).real * NUMBER_DIAG))


def entropy_production(i1: float, i2: float, b1: BathSpec, b2: BathSpec) -> float:
    """Entropy production rate sustaining the given steady-state currents.

    Bosonic reservoirs (heat transport): -I1/T1 - I2/T2.
    Fermionic reservoirs (particle transport): (mu1 I1 + mu2 I2)/T, which
    presumes a common temperature.

    Raises
    ------
    FermionTemperatureMismatch
        If the fermionic form is requested with T1 != T2.
    """
    if b1.statistics is Statistics.BOSON:
        return -i1 / b1.T - i2 / b2.T
    if abs(b1.T - b2.T) > 1e-12 * max(b1.T, b2.T):
        raise FermionTemperatureMismatch(
            f"fermionic entropy production assumes equal T, got {b1.T} and {b2.T}"
        )
    return (b1.mu * i1 + b2.mu * i2) / b1.T


@dataclass(frozen=True)
class CurrentReport:
    """Both reservoir currents with balance and entropy-production data.

    ``sign_context`` records the signs of the applied biases (dT = T2 - T1,
    dmu = mu2 - mu1) because opposite biases can produce the same entropy
    production rate; every report therefore states its own bias.
    """

    I1: float
    I2: float
    balance: float
    sigma: float
    sign_context: dict = field(default_factory=dict)


def current_report(L: Liouvillian, rho_energy: np.ndarray) -> CurrentReport:
    """Currents of both reservoirs at a solved steady state.

    Heat currents for bosonic reservoirs, particle currents for fermionic
    ones, with the matching entropy production rate.
    """
    b1, b2 = L.baths
    if b1.statistics is Statistics.BOSON:
        i1 = heat_current(L, rho_energy, 1)
        i2 = heat_current(L, rho_energy, 2)
    else:
        i1 = particle_current(L, rho_energy, 1)
        i2 = particle_current(L, rho_energy, 2)
    return CurrentReport(
        I1=i1,
        I2=i2,
        balance=abs(i1 + i2),
        sigma=entropy_production(i1, i2, b1, b2),
        sign_context={"dT": b2.T - b1.T, "dmu": b2.mu - b1.mu},
    )


def rectification_ratio(
    p: SystemParams,
    baths_forward: tuple[BathSpec, BathSpec],
    baths_reversed: tuple[BathSpec, BathSpec],
) -> float:
    """Asymmetry of the bath-2 current under reversal of the thermal bias.

    (I2(+dT) + I2(-dT)) / max(|I2(+dT)|, |I2(-dT)|), in [-1, 1]; zero for a
    spatially symmetric system, +1/-1 for a perfect diode.  Even under
    exchanging the forward and reversed configurations.

    Raises
    ------
    ZeroCurrent
        If both currents are below 1e-14 in magnitude.
    """
    currents = []
    for b1, b2 in (baths_forward, baths_reversed):
        L = build_liouvillian(p, b1, b2)
        ss = solve_steady_state(L)
        if b1.statistics is Statistics.BOSON:
            currents.append(heat_current(L, ss.rho_energy, 2))
        else:
            currents.append(particle_current(L, ss.rho_energy, 2))
    i_fwd, i_rev = currents
    denom = max(abs(i_fwd), abs(i_rev))
    if denom < ZERO_CURRENT_FLOOR:
        raise ZeroCurrent(f"both currents below {ZERO_CURRENT_FLOOR:.0e}")
    return (i_fwd + i_rev) / denom
