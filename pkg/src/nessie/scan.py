"""Parameter sweeps, extremum searches over the thermal bias, and maps.

Sweeps move along mean-fixed axes: a dT sweep holds the mean temperature
(T1 + T2)/2 exactly, a deps sweep holds the mean qubit frequency, and so on
for dmu and dgamma.  Grid points that resolve to invalid physical
parameters (for example T1 <= 0 at an extreme bias) are skipped with the
error recorded in the row, never clamped, and never abort the sweep.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.optimize

from .correlations import XState, concurrence, horodecki_m, i2_value, i3322_max
from .errors import NessieError
from .liouvillian import Liouvillian, build_liouvillian
from .params import BathSpec, Statistics, SystemParams
from .steady_state import SteadyState, solve_steady_state
from .thermodynamics import current_report, rectification_ratio

AXIS_NAMES = ("T", "mu", "dT", "dmu", "deps", "dgamma", "kappa")

OBSERVABLE_KEYS = ("C", "I1", "I2", "I2current", "I3", "R", "sigma")
_ALIASES = {"concurrence": "C"}

#: two coarse-grid local maxima separated by more than this flag multimodality
MULTIMODAL_GAP = 1e-4

#: fractional margin keeping T1, T2 strictly positive at the bias bracket edge
_BRACKET_MARGIN = 1e-6


def canonical_observable(name: str) -> str:
    key = _ALIASES.get(name, name)
    if key not in OBSERVABLE_KEYS:
        raise ValueError(f"unknown observable {name!r}; expected one of {OBSERVABLE_KEYS}")
    return key


@dataclass(frozen=True)
class Axis:
    """One sweep axis: a parameter name and a uniform grid."""

    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.points < 1:
            raise ValueError(f"axis needs at least one point, got {self.points}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class FixedParams:
    """Full mean-and-difference parameter record for one configuration.

    Differences follow the bath-2-minus-bath-1 convention: dT = T2 - T1,
    dmu = mu2 - mu1, dgamma = gamma2 - gamma1, deps = eps2 - eps1.
    """

    statistics: Statistics
    kappa: float
    T_bar: float
    eps_bar: float = 1.0
    deps: float = 0.0
    gamma_bar: float = 0.1
    dgamma: float = 0.0
    dT: float = 0.0
    mu_bar: float = 0.0
    dmu: float = 0.0

    def resolve(self, **overrides) -> tuple[SystemParams, BathSpec, BathSpec]:
        """Materialize system and bath records, applying axis overrides.

        Axis names: T and mu override the means, the rest override the
        like-named field.  Raises ValueError on unphysical values.
        """
        f = self
        for name, value in overrides.items():
            if name == "T":
                f = replace(f, T_bar=value)
            elif name == "mu":
                f = replace(f, mu_bar=value)
            elif name in ("dT", "dmu", "deps", "dgamma", "kappa"):
                f = replace(f, **{name: value})
            else:
                raise ValueError(f"unknown axis {name!r}")
        system = SystemParams(
            eps1=f.eps_bar - f.deps / 2, eps2=f.eps_bar + f.deps / 2, kappa=f.kappa
        )
        if f.statistics is Statistics.BOSON and (f.mu_bar != 0.0 or f.dmu != 0.0):
            raise ValueError("bosonic reservoirs require mu_bar = dmu = 0")
        b1 = BathSpec(
            statistics=f.statistics,
            T=f.T_bar - f.dT / 2,
            gamma=f.gamma_bar - f.dgamma / 2,
            mu=f.mu_bar - f.dmu / 2,
        )
        b2 = BathSpec(
            statistics=f.statistics,
            T=f.T_bar + f.dT / 2,
            gamma=f.gamma_bar + f.dgamma / 2,
            mu=f.mu_bar + f.dmu / 2,
        )
        return system, b1, b2


def sigma_column(statistics: Statistics) -> str:
    return "sigma_b" if statistics is Statistics.BOSON else "sigma_f"


def _column_name(key: str, statistics: Statistics) -> str:
    return sigma_column(statistics) if key == "sigma" else key


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis | None
    fixed: FixedParams
    observables: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "observables", tuple(canonical_observable(o) for o in self.observables)
        )

    def columns(self) -> list[str]:
        axes = [self.axis1.name] + ([self.axis2.name] if self.axis2 else [])
        obs = sorted(_column_name(o, self.fixed.statistics) for o in self.observables)
        diags = ["negativity", "residual"]
        if "I2" in self.observables:
            diags.append("m_branch")
        if "I3" in self.observables:
            diags.append("i3_spread")
        return axes + obs + sorted(diags) + ["err"]


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[dict]
    meta: dict


def _solve_point(fixed: FixedParams, overrides: dict) -> tuple[Liouvillian, SteadyState]:
    system, b1, b2 = fixed.resolve(**overrides)
    L = build_liouvillian(system, b1, b2)
    return L, solve_steady_state(L)


def evaluate_point(
    fixed: FixedParams,
    overrides: dict,
    observables: tuple[str, ...],
    rng: np.random.Generator,
    i3_restarts: int = 60,
) -> dict:
    """All requested observables at one resolved parameter point."""
    L, ss = _solve_point(fixed, overrides)
    out = {"residual": ss.residual, "negativity": ss.negativity}
    stat = fixed.statistics

    need_x = any(o in observables for o in ("C", "I2"))
    if need_x:
        x = XState.from_density_matrix(ss.rho_local)
    if "C" in observables:
        out["C"] = concurrence(x)
    if "I2" in observables:
        out["I2"] = i2_value(x)
        out["m_branch"] = horodecki_m(x)[1]
    if "I3" in observables:
        res = i3322_max(ss.rho_local, seed=rng, restarts=i3_restarts)
        out["I3"] = res.value
        out["i3_spread"] = res.diag.spread
    if any(o in observables for o in ("I1", "I2current", "sigma")):
        report = current_report(L, ss.rho_energy)
        if "I1" in observables:
            out["I1"] = report.I1
        if "I2current" in observables:
            out["I2current"] = report.I2
        if "sigma" in observables:
            out[sigma_column(stat)] = report.sigma
    if "R" in observables:
        bias = abs(fixed.dT if "dT" not in overrides else overrides["dT"])
        system, *_ = fixed.resolve(**overrides)
        fwd = {**overrides, "dT": bias}
        rev = {**overrides, "dT": -bias}
        _, f1, f2 = fixed.resolve(**fwd)
        _, r1, r2 = fixed.resolve(**rev)
        out["R"] = rectification_ratio(system, (f1, f2), (r1, r2))
    return out


def _parallel_map(fn: Callable, n: int, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _grid(spec: SweepSpec) -> list[dict]:
    points = []
    if spec.axis2 is None:
        for v1 in spec.axis1.values():
            points.append({spec.axis1.name: float(v1)})
    else:
        for v1 in spec.axis1.values():
            for v2 in spec.axis2.values():
                points.append({spec.axis1.name: float(v1), spec.axis2.name: float(v2)})
    return points


def run_sweep(
    spec: SweepSpec, seed: int = 0, i3_restarts: int = 60, threads: int = 1
) -> SweepResult:
    """Evaluate the requested observables over the sweep grid.

    Deterministic for fixed ``seed`` regardless of ``threads``: every grid
    point draws its own generator from (seed, grid index), and rows are
    emitted in grid order.
    """
    points = _grid(spec)
    columns = spec.columns()

    def work(i: int) -> dict:
        row = dict(points[i])
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        try:
            row.update(
                evaluate_point(spec.fixed, points[i], spec.observables, rng, i3_restarts)
            )
            row["err"] = ""
        except (NessieError, ValueError) as e:
            row["err"] = f"{type(e).__name__}: {e}"
        return row

    rows = _parallel_map(work, len(points), threads)
    good = [r for r in rows if not r["err"]]
    meta = {
        "points": len(rows),
        "errors": sum(1 for r in rows if r["err"]),
        "worst_residual": max((r["residual"] for r in good), default=None),
        "worst_negativity": max((r["negativity"] for r in good), default=None),
    }
    return SweepResult(columns=columns, rows=rows, meta=meta)


@dataclass(frozen=True)
class CntdEntry:
    """Location of a correlation extremum along the thermal bias axis."""

    objective: str
    delta_T0: float
    value: float
    boundary: bool          # maximum sits at the bracket edge
    multimodal: bool        # coarse scan saw clearly separated local maxima
    derivative: float       # centered difference of the objective at delta_T0
    evaluations: int


def _objective_fn(
    objective: str,
    fixed: FixedParams,
    rng_seed: int,
    i3_restarts: int,
) -> Callable[[float], float]:
    key = canonical_observable(objective)
    if key not in ("C", "I2", "I3"):
        raise ValueError(f"extremum objective must be C, I2 or I3, got {objective!r}")

    def f(dt: float) -> float:
        _, ss = _solve_point(fixed, {"dT": dt})
        if key == "I3":
            return i3322_max(ss.rho_local, seed=rng_seed, restarts=i3_restarts).value
        x = XState.from_density_matrix(ss.rho_local)
        return concurrence(x) if key == "C" else i2_value(x)

    return f


def find_cntd(
    objective: str,
    fixed: FixedParams,
    seed: int = 0,
    i3_restarts: int = 60,
    prescan: int = 41,
    xatol: float | None = None,
) -> CntdEntry:
    """Thermal bias maximizing the objective at fixed mean temperature.

    Coarse prescan over dT in (-2*T_bar, 2*T_bar) brackets the maximum,
    then bounded Brent refinement.  The bracket keeps both reservoir
    temperatures strictly positive.  A maximum on the bracket edge is
    returned unrefined with the ``boundary`` flag set.
    """
    t_bar = fixed.T_bar
    evals = [0]
    base = _objective_fn(objective, fixed, seed, i3_restarts)

    def f(dt: float) -> float:
        evals[0] += 1
        return base(dt)

    hi = 2.0 * t_bar * (1.0 - _BRACKET_MARGIN)
    grid = np.linspace(-hi, hi, prescan)
    vals = np.array([f(x) for x in grid])

    interior = [
        i for i in range(1, prescan - 1) if vals[i] > vals[i - 1] and vals[i] > vals[i + 1]
    ]
    peak_vals = sorted((vals[i] for i in interior), reverse=True)
    multimodal = len(peak_vals) >= 2 and (peak_vals[0] - peak_vals[1]) > MULTIMODAL_GAP

    best = int(np.argmax(vals))
    if best in (0, prescan - 1):
        h = 5e-4 * t_bar
        x0 = grid[best] - h if best else grid[best] + h  # one-sided-safe stencil center
        deriv = (f(x0 + h) - f(x0 - h)) / (2 * h)
        return CntdEntry(
            objective=canonical_observable(objective),
            delta_T0=float(grid[best]),
            value=float(vals[best]),
            boundary=True,
            multimodal=multimodal,
            derivative=float(deriv),
            evaluations=evals[0],
        )

    res = scipy.optimize.minimize_scalar(
        lambda x: -f(x),
        bounds=(grid[best - 1], grid[best + 1]),
        method="bounded",
        options={"xatol": xatol if xatol is not None else 1e-8 * t_bar, "maxiter": 500},
    )
    x_opt = float(res.x)
    h = 5e-4 * t_bar
    deriv = (f(x_opt + h) - f(x_opt - h)) / (2 * h)
    return CntdEntry(
        objective=canonical_observable(objective),
        delta_T0=x_opt,
        value=float(-res.fun),
        boundary=False,
        multimodal=multimodal,
        derivative=float(deriv),
        evaluations=evals[0],
    )


MAP_COLUMNS = ["deps", "dgamma", "R", "dT0_C", "dT0_C_edge", "dT0_I2", "dT0_I2_edge", "err"]


def cntd_cancellation_map(
    fixed: FixedParams,
    deps_values,
    dgamma_values,
    rect_dT: float,
    seed: int = 0,
    threads: int = 1,
    prescan: int = 41,
) -> SweepResult:
    """Bias extrema and rectification over a (deps, dgamma) asymmetry grid.

    For every grid point: the thermal-bias maxima of concurrence and of the
    CHSH violation, and the rectification ratio at ``rect_dT``.
    """
    points = [
        (float(de), float(dg)) for de in np.asarray(deps_values) for dg in np.asarray(dgamma_values)
    ]

    def work(i: int) -> dict:
        de, dg = points[i]
        row = {"deps": de, "dgamma": dg}
        base = replace(fixed, deps=de, dgamma=dg)
        try:
            for obj, col in (("C", "dT0_C"), ("I2", "dT0_I2")):
                entry = find_cntd(obj, base, seed=seed, prescan=prescan)
                row[col] = entry.delta_T0
                row[f"{col}_edge"] = int(entry.boundary)
            system, *_ = base.resolve()
            _, f1, f2 = base.resolve(dT=rect_dT)
            _, r1, r2 = base.resolve(dT=-rect_dT)
            row["R"] = rectification_ratio(system, (f1, f2), (r1, r2))
            row["err"] = ""
        except (NessieError, ValueError) as e:
            row["err"] = f"{type(e).__name__}: {e}"
        return row

    rows = _parallel_map(work, len(points), threads)
    meta = {"points": len(rows), "errors": sum(1 for r in rows if r["err"])}
    return SweepResult(columns=list(MAP_COLUMNS), rows=rows, meta=meta)
