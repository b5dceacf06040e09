"""Run configuration: TOML parsing, validation, mean/absolute conversion."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .params import Statistics
from .scan import AXIS_NAMES, Axis, FixedParams, SweepSpec, canonical_observable

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODES = ("point", "sweep", "cntd", "rectmap")

#: headline single points use the full restart budget; sweeps use a reduced one
DEFAULT_RESTARTS = {"point": 200, "sweep": 60, "cntd": 60, "rectmap": 60}

_POINT_DEFAULT_OBSERVABLES = ("C", "I1", "I2", "I2current", "I3", "sigma")

_BATH_MEAN_KEYS = ("T_bar", "dT", "mu_bar", "dmu", "gamma_bar", "dgamma")
_BATH_ABS_KEYS = ("T1", "T2", "mu1", "mu2", "gamma1", "gamma2")


@dataclass(frozen=True)
class RectmapSpec:
    deps_start: float
    deps_stop: float
    dgamma_start: float
    dgamma_stop: float
    points: int        # grid points along deps
    points2: int       # grid points along dgamma
    rect_dT: float


@dataclass(frozen=True)
class RunConfig:
    mode: str
    fixed: FixedParams
    observables: tuple[str, ...]
    sweep: SweepSpec | None
    cntd_objectives: tuple[str, ...]
    rectmap: RectmapSpec | None
    seed: int
    restarts: int
    output_dir: str
    output_format: str


def _number(section: dict, section_name: str, key: str, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"{section_name}.{key}", "required key is missing")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section_name}.{key}", f"expected a number, got {v!r}")
    return float(v)


def _pair(section: dict, section_name: str, key: str):
    v = section.get(key)
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)):
        raise ConfigError(f"{section_name}.{key}", f"expected [start, stop], got {v!r}")
    return float(v[0]), float(v[1])


def _int(section: dict, section_name: str, key: str, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"{section_name}.{key}", "required key is missing")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{section_name}.{key}", f"expected an integer, got {v!r}")
    return v


def _system_block(doc: dict) -> tuple[float, float, float]:
    """Return (eps_bar, deps, kappa) from absolute or mean+delta form."""
    sec = doc.get("system")
    if not isinstance(sec, dict):
        raise ConfigError("system", "required section is missing")
    kappa = _number(sec, "system", "kappa", required=True)
    has_abs = "eps1" in sec or "eps2" in sec
    has_mean = "eps_bar" in sec or "deps" in sec
    if has_abs and has_mean:
        raise ConfigError("system.eps1", "absolute (eps1/eps2) and mean+delta (eps_bar/deps) forms are mutually exclusive")
    if has_abs:
        e1 = _number(sec, "system", "eps1", required=True)
        e2 = _number(sec, "system", "eps2", required=True)
        return 0.5 * (e1 + e2), e2 - e1, kappa
    eps_bar = _number(sec, "system", "eps_bar", default=1.0)
    deps = _number(sec, "system", "deps", default=0.0)
    return eps_bar, deps, kappa


def _bath_block(doc: dict) -> dict:
    sec = doc.get("baths")
    if not isinstance(sec, dict):
        raise ConfigError("baths", "required section is missing")
    stat_name = sec.get("statistics")
    try:
        statistics = Statistics(stat_name)
    except ValueError:
        raise ConfigError("baths.statistics", f"expected 'boson' or 'fermion', got {stat_name!r}")
    has_abs = any(k in sec for k in _BATH_ABS_KEYS)
    has_mean = any(k in sec for k in _BATH_MEAN_KEYS)
    if has_abs and has_mean:
        first = next(k for k in _BATH_ABS_KEYS if k in sec)
        raise ConfigError(f"baths.{first}", "absolute (T1/T2/...) and mean+delta (T_bar/dT/...) forms are mutually exclusive")
    if has_abs:
        t1 = _number(sec, "baths", "T1", required=True)
        t2 = _number(sec, "baths", "T2", required=True)
        g1 = _number(sec, "baths", "gamma1", required=True)
        g2 = _number(sec, "baths", "gamma2", required=True)
        m1 = _number(sec, "baths", "mu1", default=0.0)
        m2 = _number(sec, "baths", "mu2", default=0.0)
        return dict(
            statistics=statistics,
            T_bar=0.5 * (t1 + t2), dT=t2 - t1,
            gamma_bar=0.5 * (g1 + g2), dgamma=g2 - g1,
            mu_bar=0.5 * (m1 + m2), dmu=m2 - m1,
        )
    return dict(
        statistics=statistics,
        T_bar=_number(sec, "baths", "T_bar", required=True),
        dT=_number(sec, "baths", "dT", default=0.0),
        gamma_bar=_number(sec, "baths", "gamma_bar", default=0.1),
        dgamma=_number(sec, "baths", "dgamma", default=0.0),
        mu_bar=_number(sec, "baths", "mu_bar", default=0.0),
        dmu=_number(sec, "baths", "dmu", default=0.0),
    )


def _observables(sec: dict, section_name: str, default: tuple[str, ...]) -> tuple[str, ...]:
    raw = sec.get("observables")
    if raw is None:
        return default
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{section_name}.observables", f"expected a non-empty list, got {raw!r}")
    try:
        return tuple(canonical_observable(str(o)) for o in raw)
    except ValueError as e:
        raise ConfigError(f"{section_name}.observables", str(e))


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a run configuration file.

    Raises
    ------
    ConfigError
        Naming the offending key, on any parse or validation problem.
    """
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(str(path), f"cannot parse config: {e}")

    mode = doc.get("mode")
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {MODES}, got {mode!r}")

    eps_bar, deps, kappa = _system_block(doc)
    bath = _bath_block(doc)
    try:
        fixed = FixedParams(kappa=kappa, eps_bar=eps_bar, deps=deps, **bath)
    except ValueError as e:
        raise ConfigError("system", str(e))

    sweep = None
    observables: tuple[str, ...] = _POINT_DEFAULT_OBSERVABLES
    cntd_objectives: tuple[str, ...] = ("C", "I2", "I3")
    rectmap = None

    if mode == "point":
        observables = _observables(doc.get("point", {}), "point", _POINT_DEFAULT_OBSERVABLES)
    elif mode == "sweep":
        sec = doc.get("sweep")
        if not isinstance(sec, dict):
            raise ConfigError("sweep", "required section is missing for mode = 'sweep'")
        name1 = sec.get("axis1")
        if name1 not in AXIS_NAMES:
            raise ConfigError("sweep.axis1", f"expected one of {AXIS_NAMES}, got {name1!r}")
        lo1, hi1 = _pair(sec, "sweep", "range1")
        n1 = _int(sec, "sweep", "points1", required=True)
        axis2 = None
        if "axis2" in sec:
            name2 = sec.get("axis2")
            if name2 not in AXIS_NAMES:
                raise ConfigError("sweep.axis2", f"expected one of {AXIS_NAMES}, got {name2!r}")
            lo2, hi2 = _pair(sec, "sweep", "range2")
            n2 = _int(sec, "sweep", "points2", required=True)
            axis2 = Axis(name2, lo2, hi2, n2)
        observables = _observables(sec, "sweep", ("C", "I2", "I3"))
        try:
            sweep = SweepSpec(Axis(name1, lo1, hi1, n1), axis2, fixed, observables)
        except ValueError as e:
            raise ConfigError("sweep", str(e))
    elif mode == "cntd":
        sec = doc.get("cntd", {})
        objs = sec.get("objectives")
        if objs is not None:
            if not isinstance(objs, list) or not objs:
                raise ConfigError("cntd.objectives", f"expected a non-empty list, got {objs!r}")
            try:
                cntd_objectives = tuple(canonical_observable(str(o)) for o in objs)
            except ValueError as e:
                raise ConfigError("cntd.objectives", str(e))
            if any(o not in ("C", "I2", "I3") for o in cntd_objectives):
                raise ConfigError("cntd.objectives", "objectives must be C, I2 or I3")
    elif mode == "rectmap":
        sec = doc.get("rectmap")
        if not isinstance(sec, dict):
            raise ConfigError("rectmap", "required section is missing for mode = 'rectmap'")
        de = _pair(sec, "rectmap", "deps")
        dg = _pair(sec, "rectmap", "dgamma")
        points = _int(sec, "rectmap", "points", default=21)
        rectmap = RectmapSpec(
            deps_start=de[0], deps_stop=de[1],
            dgamma_start=dg[0], dgamma_stop=dg[1],
            points=points,
            points2=_int(sec, "rectmap", "points2", default=points),
            rect_dT=_number(sec, "rectmap", "rect_dT", required=True),
        )

    opt = doc.get("optimizer", {})
    seed = _int(opt, "optimizer", "seed", default=0)
    restarts = _int(opt, "optimizer", "restarts", default=DEFAULT_RESTARTS[mode])

    out = doc.get("output", {})
    output_dir = out.get("directory", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("output.directory", f"expected a string, got {output_dir!r}")
    output_format = out.get("format", "csv")
    if output_format not in ("csv",):
        raise ConfigError("output.format", f"only 'csv' is supported, got {output_format!r}")

    return RunConfig(
        mode=mode,
        fixed=fixed,
        observables=observables,
        sweep=sweep,
        cntd_objectives=cntd_objectives,
        rectmap=rectmap,
        seed=seed,
        restarts=restarts,
        output_dir=output_dir,
        output_format=output_format,
    )
