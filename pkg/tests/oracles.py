"""Shared oracles and random-state generators for the test suite (not a
conftest: imported explicitly by the test modules).

The oracles here deliberately avoid the code paths they check: concurrence
via the spin-flip eigenvalue construction, CHSH via explicit Bell-operator
maximization over observable angles, and the three-setting violation via a
dense planar grid with full-sphere polish.
"""

import numpy as np
import scipy.optimize

from nessie.correlations import Observable, correlation_data
from nessie.params import BathSpec, Statistics, SystemParams

SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
_YY = np.kron(SIGMA_Y, SIGMA_Y)


def wootters_concurrence(rho: np.ndarray) -> float:
    """General two-qubit concurrence from the spin-flip spectrum."""
    rho = np.asarray(rho, dtype=complex)
    rt = rho @ _YY @ rho.conj() @ _YY
    ev = np.sqrt(np.clip(np.linalg.eigvals(rt).real, 0.0, None))
    ev.sort()
    return max(0.0, ev[3] - ev[2] - ev[1] - ev[0])


def horodecki_general(rho: np.ndarray) -> float:
    """Maximal CHSH expectation for ANY two-qubit state.

    2*sqrt(m1 + m2) with m1, m2 the two largest eigenvalues of T^T T;
    reduces to the X-state closed form when rho is X-shaped.
    """
    tmat, _, _ = correlation_data(rho)
    m = np.sort(np.linalg.eigvalsh(tmat.T @ tmat))
    return float(2.0 * np.sqrt(m[-1] + m[-2]))


def random_local_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-ish product unitary U1 (x) U2."""
    us = []
    for _ in range(2):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(m)
        us.append(q * (np.diag(r) / np.abs(np.diag(r))))
    return np.kron(us[0], us[1])


_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
_SZ = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)


def chsh_value(rho: np.ndarray, angles: np.ndarray) -> float:
    """Bell expectation for explicitly constructed observables.

    angles = (theta_a1, phi_a1, theta_a2, phi_a2, theta_b1, ..., phi_b2).
    """
    th, ph = angles[0::2], angles[1::2]
    st = np.sin(th)
    nx, ny, nz = st * np.cos(ph), st * np.sin(ph), np.cos(th)
    a1, a2, b1, b2 = (
        nx[k] * _SX + ny[k] * _SY + nz[k] * _SZ for k in range(4)
    )
    bell = np.kron(a1, b1 + b2) + np.kron(a2, b1 - b2)
    return float(np.einsum("ij,ji->", bell, rho).real)


def chsh_oracle(rho: np.ndarray, restarts: int = 64, seed: int = 0) -> float:
    """Multi-start gradient-free maximization over the four observables.

    The objective contracts the state's correlation matrix with the four
    Bloch vectors — an exact identity with the explicit Bell-operator trace
    (asserted in the correlations tests) that keeps each evaluation cheap.
    """
    tmat, _, _ = correlation_data(rho)

    def value(angles):
        th, ph = angles[0::2], angles[1::2]
        st = np.sin(th)
        n = np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=1)
        return n[0] @ tmat @ (n[2] + n[3]) + n[1] @ tmat @ (n[2] - n[3])

    rng = np.random.default_rng(seed)
    best = -np.inf
    for _ in range(restarts):
        x0 = np.empty(8)
        x0[0::2] = np.arccos(rng.uniform(-1.0, 1.0, size=4))
        x0[1::2] = rng.uniform(0.0, 2.0 * np.pi, size=4)
        res = scipy.optimize.minimize(
            lambda x: -value(x),
            x0,
            method="Nelder-Mead",
            options={"maxiter": 300, "fatol": 1e-9, "xatol": 1e-5},
        )
        best = max(best, -res.fun)
    return best


def _x_phase_normalize(rho: np.ndarray) -> np.ndarray:
    """Local phase rotation making both X-state coherences real nonnegative."""
    r14, r23 = rho[0, 3], rho[1, 2]
    half_sum = 0.5 * np.angle(r14) if abs(r14) > 1e-15 else 0.0
    half_diff = -0.5 * np.angle(r23) if abs(r23) > 1e-15 else 0.0
    phi1, phi2 = half_sum - half_diff, half_sum + half_diff
    u = np.diag([1.0, np.exp(1j * phi2), np.exp(1j * phi1), np.exp(1j * (phi1 + phi2))])
    return u @ rho @ u.conj().T


def i3322_grid_oracle(rho: np.ndarray, n_grid: int = 48, polish_top: int = 20) -> float:
    """Dense planar grids over Alice's polar angles with analytic Bob step.

    Valid for X states: a local unitary first makes both coherences real, so
    the correlation matrix is diagonal and the x-z / y-z coordinate-plane
    grids land in every optimum's basin; a full-sphere Nelder-Mead polish
    from the best grid points then removes grid bias and reaches non-planar
    optima.
    """
    rho = _x_phase_normalize(np.asarray(rho, dtype=complex))
    tmat, a_loc, b_loc = correlation_data(rho)

    def g(angles):
        th, ph = angles[0::2], angles[1::2]
        rows = np.stack(
            [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1
        )
        r12 = rows[0] + rows[1]
        v1 = tmat.T @ (r12 + rows[2]) - b_loc
        v2 = tmat.T @ (r12 - rows[2]) - b_loc
        v3 = tmat.T @ (rows[0] - rows[1])
        return (
            np.linalg.norm(v1) + np.linalg.norm(v2) + np.linalg.norm(v3) + r12 @ a_loc
        )

    t = np.linspace(0.0, 2.0 * np.pi, n_grid, endpoint=False)
    best = -np.inf
    starts = []
    for azimuth in (0.0, np.pi / 2):  # x-z plane, then y-z plane
        vecs = np.stack(
            [np.sin(t) * np.cos(azimuth), np.sin(t) * np.sin(azimuth), np.cos(t)],
            axis=1,
        )
        a1 = vecs[:, None, None, :]
        a2 = vecs[None, :, None, :]
        a3 = vecs[None, None, :, :]
        s12 = a1 + a2
        c1 = np.linalg.norm((s12 + a3) @ tmat - b_loc, axis=-1)
        c2 = np.linalg.norm((s12 - a3) @ tmat - b_loc, axis=-1)
        c3 = np.linalg.norm((a1 - a2) @ tmat, axis=-1)
        obj = c1 + c2 + c3 + s12 @ a_loc
        flat = obj.ravel()
        best = max(best, float(flat.max()))
        for idx in np.argsort(flat)[-polish_top:]:
            i, j, k = np.unravel_index(idx, obj.shape)
            starts.append(
                np.array([t[i], azimuth, t[j], azimuth, t[k], azimuth])
            )

    # deterministic off-plane jitter widens polish coverage of mixed optima
    jitters = (np.zeros(6), np.full(6, 0.35), np.full(6, -0.35))
    for x0 in starts:
        for dj in jitters:
            res = scipy.optimize.minimize(
                lambda x: -g(x),
                x0 + dj,
                method="Nelder-Mead",
                options={"maxiter": 1500, "fatol": 1e-12, "xatol": 1e-8},
            )
            best = max(best, float(-res.fun))
    return best


def random_x_state(rng: np.random.Generator):
    """Random valid X state (populations + admissible coherences)."""
    from nessie.correlations import XState

    p = rng.dirichlet(np.ones(4))
    r14 = (
        np.sqrt(p[0] * p[3]) * rng.uniform(0.0, 1.0) * np.exp(2j * np.pi * rng.uniform())
    )
    r23 = (
        np.sqrt(p[1] * p[2]) * rng.uniform(0.0, 1.0) * np.exp(2j * np.pi * rng.uniform())
    )
    return XState(p11=p[0], p22=p[1], p33=p[2], p44=p[3], r14=r14, r23=r23)


def random_setup(rng: np.random.Generator, statistics: Statistics, equilibrium: bool):
    """Random valid (SystemParams, BathSpec, BathSpec) draw off the regime boundary.

    Fermionic draws stay in the weak regime: the particle-conserving hopping
    coupling only supports kappa < 2 sqrt(eps1 eps2).
    """
    eps1 = rng.uniform(0.5, 2.0)
    eps2 = rng.uniform(0.5, 2.0)
    boundary = 2.0 * np.sqrt(eps1 * eps2)
    if statistics is Statistics.FERMION or rng.uniform() < 0.5:
        kappa = boundary * rng.uniform(0.2, 0.8)
    else:
        kappa = boundary * rng.uniform(1.2, 2.5)
    p = SystemParams(eps1, eps2, kappa)
    gammas = rng.uniform(0.02, 0.12, size=2)
    if equilibrium:
        t1 = t2 = rng.uniform(0.2, 2.0)
        mu1 = mu2 = rng.uniform(0.0, 1.5) if statistics is Statistics.FERMION else 0.0
    elif statistics is Statistics.FERMION:
        # fermionic bias is a chemical-potential difference at a common T
        t1 = t2 = rng.uniform(0.2, 2.0)
        mu1, mu2 = rng.uniform(0.0, 1.5, size=2)
    else:
        t1, t2 = rng.uniform(0.2, 2.0, size=2)
        mu1, mu2 = 0.0, 0.0
    b1 = BathSpec(statistics, T=t1, gamma=gammas[0], mu=mu1)
    b2 = BathSpec(statistics, T=t2, gamma=gammas[1], mu=mu2)
    return p, b1, b2
