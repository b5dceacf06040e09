"""Entanglement and Bell-violation measures for two-qubit states.

All states here live in the local product basis |00>, |01>, |10>, |11>
(qubit 1 = Alice, qubit 2 = Bob).  Pauli matrices follow the package
convention sigma_z = diag(-1, +1), i.e. |0> is the ground state.

The CHSH maximum uses the closed form for X states: the larger of a
pure-coherence branch and a population-imbalance branch.  The three-setting
inequality has no closed form; its maximum is found by multi-start see-saw
over Alice's observables with Bob's optimal observables computed
analytically from the effective correlation fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import StructureViolation

SQRT2 = math.sqrt(2.0)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
_SIGMA = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
_ID2 = np.eye(2, dtype=complex)

# kron(sigma_m, sigma_n), kron(sigma_m, 1), kron(1, sigma_n): fixed tensors
# so correlation data reduces to einsum contractions.
_KK = np.stack([np.stack([np.kron(a, b) for b in _SIGMA]) for a in _SIGMA])
_KA = np.stack([np.kron(a, _ID2) for a in _SIGMA])
_KB = np.stack([np.kron(_ID2, b) for b in _SIGMA])

_OFF_X = [(0, 1), (0, 2), (1, 3), (2, 3)]


@dataclass(frozen=True)
class XState:
    """Populations and anti-diagonal coherences of a two-qubit X state."""

    p11: float
    p22: float
    p33: float
    p44: float
    r14: complex
    r23: complex

    def __post_init__(self):
        pops = (self.p11, self.p22, self.p33, self.p44)
        if min(pops) < -1e-9:
            raise ValueError(f"negative population: {pops}")
        if abs(sum(pops) - 1.0) > 1e-8:
            raise ValueError(f"populations must sum to 1, got {sum(pops)}")
        if abs(self.r14) > math.sqrt(max(self.p11, 0.0) * max(self.p44, 0.0)) + 1e-8:
            raise ValueError("|r14| exceeds sqrt(p11*p44): not positive semidefinite")
        if abs(self.r23) > math.sqrt(max(self.p22, 0.0) * max(self.p33, 0.0)) + 1e-8:
            raise ValueError("|r23| exceeds sqrt(p22*p33): not positive semidefinite")

    @classmethod
    def from_density_matrix(cls, rho: np.ndarray, atol: float = 1e-8) -> "XState":
        """Extract X-state data; reject matrices that are not X-shaped.

        Raises
        ------
        StructureViolation
            If any entry outside the X pattern exceeds ``atol`` in magnitude
            (entries are never silently zeroed).
        """
        rho = np.asarray(rho, dtype=complex)
        worst = max(abs(rho[i, j]) for i, j in _OFF_X)
        worst = max(worst, max(abs(rho[j, i]) for i, j in _OFF_X))
        if worst > atol:
            raise StructureViolation(
                f"entry outside the X pattern has magnitude {worst:.3e} > {atol:.1e}"
            )
        return cls(
            p11=rho[0, 0].real,
            p22=rho[1, 1].real,
            p33=rho[2, 2].real,
            p44=rho[3, 3].real,
            r14=complex(rho[0, 3]),
            r23=complex(rho[1, 2]),
        )

    def to_density_matrix(self) -> np.ndarray:
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3] = self.p11, self.p22, self.p33, self.p44
        rho[0, 3], rho[3, 0] = self.r14, np.conj(self.r14)
        rho[1, 2], rho[2, 1] = self.r23, np.conj(self.r23)
        return rho


def concurrence(x: XState) -> float:
    """Closed-form concurrence of an X state, in [0, 1]."""
    return 2.0 * max(
        0.0,
        abs(x.r23) - math.sqrt(max(x.p11, 0.0) * max(x.p44, 0.0)),
        abs(x.r14) - math.sqrt(max(x.p22, 0.0) * max(x.p33, 0.0)),
    )


def horodecki_m(x: XState) -> tuple[float, int]:
    """Correlation invariant M and the branch (1 or 2) attaining it.

    Branch 1 is the pure-coherence contribution 8(|r14|^2 + |r23|^2);
    branch 2 is the population imbalance plus coherences,
    (p11 + p44 - p22 - p33)^2 + 4(|r23| + |r14|)^2.
    """
    m1 = 8.0 * (abs(x.r14) ** 2 + abs(x.r23) ** 2)
    m2 = (x.p11 + x.p44 - x.p22 - x.p33) ** 2 + 4.0 * (abs(x.r23) + abs(x.r14)) ** 2
    return (m1, 1) if m1 >= m2 else (m2, 2)


def chsh_max(x: XState) -> float:
    """Maximal CHSH expectation 2*sqrt(M) over all observable choices."""
    m, _ = horodecki_m(x)
    return 2.0 * math.sqrt(m)


def i2_value(x: XState) -> float:
    """Normalized CHSH violation: 0 below the classical bound, 1 at 2*sqrt(2)."""
    return max(0.0, (chsh_max(x) - 2.0) / (2.0 * SQRT2 - 2.0))


@dataclass(frozen=True)
class Observable:
    """Dichotomic qubit observable n.sigma for a unit Bloch vector n."""

    theta: float
    phi: float

    @classmethod
    def from_unit_vector(cls, n) -> "Observable":
        n = np.asarray(n, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-9:
            raise ValueError(f"Bloch vector must be unit length, got |n|={np.linalg.norm(n)}")
        return cls(theta=math.acos(np.clip(n[2], -1.0, 1.0)), phi=math.atan2(n[1], n[0]))

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def matrix(self) -> np.ndarray:
        n = self.unit_vector
        return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def bell_operator_chsh(a1: Observable, a2: Observable, b1: Observable, b2: Observable) -> np.ndarray:
    """Two-setting Bell operator A1 x (B1+B2) + A2 x (B1-B2)."""
    return np.kron(a1.matrix, b1.matrix + b2.matrix) + np.kron(a2.matrix, b1.matrix - b2.matrix)


def bell_operator_3322(a, b) -> np.ndarray:
    """Three-setting Bell operator with local marginal terms.

    A1 x (B1+B2+B3) + A2 x (B1+B2-B3) + A3 x (B1-B2)
    + (A1+A2) x 1 - 1 x (B1+B2)

    Accepts Observables or raw 2x2 matrices; the latter allows degenerate
    (non-dichotomic) entries such as -1, under which the operator reduces to
    the two-setting form plus a constant — the production optimizer itself
    sticks to dichotomic observables.
    """
    a1, a2, a3 = (o.matrix if isinstance(o, Observable) else o for o in a)
    b1, b2, b3 = (o.matrix if isinstance(o, Observable) else o for o in b)
    return (
        np.kron(a1, b1 + b2 + b3)
        + np.kron(a2, b1 + b2 - b3)
        + np.kron(a3, b1 - b2)
        + np.kron(a1 + a2, _ID2)
        - np.kron(_ID2, b1 + b2)
    )


def correlation_data(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Correlation matrix T and local Bloch vectors (Alice, Bob) of rho.

    T[m, n] = Tr(rho sigma_m x sigma_n); everything any Bell expectation
    built from dichotomic qubit observables can depend on.
    """
    rho = np.asarray(rho, dtype=complex)
    tmat = np.einsum("ij,mnji->mn", rho, _KK).real
    a_loc = np.einsum("ij,mji->m", rho, _KA).real
    b_loc = np.einsum("ij,mji->m", rho, _KB).real
    return tmat, a_loc, b_loc


@dataclass(frozen=True)
class OptimizerDiag:
    restarts: int
    best_objective: float
    spread: float          # best minus worst within the top decile of restarts
    converged: bool        # spread within the non-convergence threshold


@dataclass(frozen=True)
class BellResult:
    """Maximal three-setting violation with the optimizing observables."""

    value: float                           # max(0, raw - classical bound 4)
    raw: float                             # maximal operator expectation
    alice: tuple[Observable, Observable, Observable]
    bob: tuple[Observable, Observable, Observable]
    diag: OptimizerDiag


def _unit_rows(m: np.ndarray) -> np.ndarray:
    out = m.copy()
    for k in range(out.shape[0]):
        nrm = np.linalg.norm(out[k])
        out[k] = out[k] / nrm if nrm > 1e-15 else np.array([0.0, 0.0, 1.0])
    return out


def _bob_fields(tmat, b_loc, alice):
    a1, a2, a3 = alice
    tt = tmat.T
    return np.stack([tt @ (a1 + a2 + a3) - b_loc, tt @ (a1 + a2 - a3) - b_loc, tt @ (a1 - a2)])


def _alice_fields(tmat, a_loc, bob):
    b1, b2, b3 = bob
    return np.stack([tmat @ (b1 + b2 + b3) + a_loc, tmat @ (b1 + b2 - b3) + a_loc, tmat @ (b1 - b2)])


def _objective(tmat, a_loc, b_loc, alice) -> float:
    """Bell expectation after Bob's analytic optimization, for fixed Alice."""
    c = _bob_fields(tmat, b_loc, alice)
    return float(np.linalg.norm(c, axis=1).sum() + (alice[0] + alice[1]) @ a_loc)


def _seesaw(tmat, a_loc, b_loc, alice, tol=1e-9, max_iter=500):
    """Alternate Bob-analytic and Alice-analytic updates until stationary."""
    value = _objective(tmat, a_loc, b_loc, alice)
    for _ in range(max_iter):
        bob = _unit_rows(_bob_fields(tmat, b_loc, alice))
        alice = _unit_rows(_alice_fields(tmat, a_loc, bob))
        new = _objective(tmat, a_loc, b_loc, alice)
        if new - value < tol:
            value = max(value, new)
            break
        value = new
    return value, alice


def _angles_to_rows(angles: np.ndarray) -> np.ndarray:
    th, ph = angles[0::2], angles[1::2]
    st = np.sin(th)
    return np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=1)


def _rows_to_angles(rows: np.ndarray) -> np.ndarray:
    out = np.empty(6)
    out[0::2] = np.arccos(np.clip(rows[:, 2], -1.0, 1.0))
    out[1::2] = np.arctan2(rows[:, 1], rows[:, 0])
    return out


#: restart spread beyond this reports (non-fatally) a failure to converge
NONCONVERGENCE_SPREAD = 1e-3


def i3322_max(
    rho: np.ndarray,
    seed: int | np.random.Generator = 0,
    restarts: int = 200,
    seesaw_tol: float = 1e-9,
    max_iter: int = 500,
    polish: int = 3,
) -> BellResult:
    """Maximal violation of the three-setting inequality for a two-qubit state.

    Multi-start search: ``restarts`` uniformly random draws of Alice's three
    Bloch vectors, each driven to a stationary point by alternating
    Bob-analytic / Alice-analytic updates, then the ``polish`` best
    candidates refined by Nelder-Mead over Alice's six angles.  Deterministic
    for a fixed ``seed``.  Degenerate zero effective fields fall back to the
    z axis (their contribution is zero either way).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    tmat, a_loc, b_loc = correlation_data(rho)

    values = np.empty(restarts)
    candidates = []
    for r in range(restarts):
        alice0 = _unit_rows(rng.normal(size=(3, 3)))
        values[r], alice = _seesaw(tmat, a_loc, b_loc, alice0, tol=seesaw_tol, max_iter=max_iter)
        candidates.append(alice)

    order = np.argsort(values)[::-1]
    best_value = values[order[0]]
    best_alice = candidates[order[0]]
    for idx in order[: max(polish, 1)]:
        res = scipy.optimize.minimize(
            lambda ang: -_objective(tmat, a_loc, b_loc, _angles_to_rows(ang)),
            _rows_to_angles(candidates[idx]),
            method="Nelder-Mead",
            options={"maxiter": max_iter, "fatol": seesaw_tol, "xatol": 1e-7},
        )
        if -res.fun > best_value:
            best_value = -res.fun
            best_alice = _angles_to_rows(res.x)

    top = values[order[: max(1, restarts // 10)]]
    spread = float(top.max() - top.min())
    bob_rows = _unit_rows(_bob_fields(tmat, b_loc, best_alice))
    return BellResult(
        value=max(0.0, best_value - 4.0),
        raw=float(best_value),
        alice=tuple(Observable.from_unit_vector(v) for v in best_alice),
        bob=tuple(Observable.from_unit_vector(v) for v in bob_rows),
        diag=OptimizerDiag(
            restarts=restarts,
            best_objective=float(best_value),
            spread=spread,
            converged=spread <= NONCONVERGENCE_SPREAD,
        ),
    )
