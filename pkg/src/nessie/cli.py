"""Batch command-line front-end.

One configuration file fully determines a run; the only command-line
overrides are --output-dir and --threads, so a config plus a seed is a
reproducible recipe.  Outputs are written atomically (temp file + rename)
and every run leaves a manifest.json recording the resolved parameters,
seed, wall time, and the worst solver diagnostics.

Exit status: 0 on success (sweeps always, with per-row error column),
1 on configuration errors, 2 on solver degeneracy in point mode.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, NessieError
from .scan import (
    cntd_cancellation_map,
    evaluate_point,
    find_cntd,
    run_sweep,
    sigma_column,
)

ENV_SEED = "NESSIE_SEED"


def _format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row.get(c)) for c in columns))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path: Path) -> tuple[list[str], list[dict]]:
    lines = path.read_text().splitlines()
    columns = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        row = {}
        for c, cell in zip(columns, cells):
            if cell == "":
                row[c] = None
            elif c == "err":
                row[c] = cell
            else:
                try:
                    row[c] = float(cell)
                except ValueError:
                    row[c] = cell
        rows.append(row)
    return columns, rows


def spot_check(path: Path, fraction: float = 0.01, seed: int = 0) -> None:
    """Re-load an emitted CSV and assert row invariants on a random sample.

    Checks value ranges for C/I2/I3, the nonlocal-implies-entangled
    ordering, and current balance where both currents are present.
    """
    columns, rows = read_csv(path)
    rows = [r for r in rows if not r.get("err")]
    if not rows:
        return
    k = max(1, int(len(rows) * fraction))
    sample = random.Random(seed).sample(rows, k)
    for r in sample:
        for key in ("C", "I2", "I3"):
            v = r.get(key)
            if v is not None and not (-1e-12 <= v <= 1.0 + 1e-6):
                raise AssertionError(f"{path}: {key}={v} out of range in row {r}")
        c, i2 = r.get("C"), r.get("I2")
        if c is not None and i2 is not None and i2 > 1e-6 and not c > 1e-6:
            raise AssertionError(f"{path}: I2={i2} > 0 but C={c} in row {r}")
        i1, i2c = r.get("I1"), r.get("I2current")
        if i1 is not None and i2c is not None:
            tol = 1e-9 * max(abs(i1), abs(i2c), 0.1)
            if abs(i1 + i2c) > tol:
                raise AssertionError(f"{path}: current balance {i1 + i2c} in row {r}")


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if hasattr(obj, "value") and obj.__class__.__module__ == "nessie.params":
        return obj.value  # Statistics enum
    return obj


def _point_columns(cfg: RunConfig) -> list[str]:
    obs = sorted(
        sigma_column(cfg.fixed.statistics) if o == "sigma" else o for o in cfg.observables
    )
    diags = ["negativity", "residual"]
    if "I2" in cfg.observables:
        diags.append("m_branch")
    if "I3" in cfg.observables:
        diags.append("i3_spread")
    return obs + sorted(diags) + ["err"]


def _run(cfg: RunConfig, config_path: Path, out_dir: Path, threads: int, seed: int, seed_source: str) -> int:
    t0 = time.monotonic()
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    meta: dict = {}
    status = 0

    if cfg.mode == "point":
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
        row = evaluate_point(cfg.fixed, {}, cfg.observables, rng, cfg.restarts)
        row["err"] = ""
        csv_path = out_dir / "point.csv"
        write_csv(csv_path, _point_columns(cfg), [row])
        outputs.append(csv_path.name)
        meta = {
            "points": 1,
            "errors": 0,
            "worst_residual": row.get("residual"),
            "worst_negativity": row.get("negativity"),
        }
    elif cfg.mode == "sweep":
        result = run_sweep(cfg.sweep, seed=seed, i3_restarts=cfg.restarts, threads=threads)
        csv_path = out_dir / "sweep.csv"
        write_csv(csv_path, result.columns, result.rows)
        spot_check(csv_path, seed=seed)
        outputs.append(csv_path.name)
        meta = result.meta
    elif cfg.mode == "cntd":
        entries = [
            find_cntd(obj, cfg.fixed, seed=seed, i3_restarts=cfg.restarts)
            for obj in cfg.cntd_objectives
        ]
        payload = {f"delta_T0_{e.objective}": _jsonable(e) for e in entries}
        json_path = out_dir / "cntd.json"
        _atomic_write(json_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        outputs.append(json_path.name)
        meta = {"points": len(entries), "errors": 0}
    elif cfg.mode == "rectmap":
        rm = cfg.rectmap
        result = cntd_cancellation_map(
            cfg.fixed,
            np.linspace(rm.deps_start, rm.deps_stop, rm.points),
            np.linspace(rm.dgamma_start, rm.dgamma_stop, rm.points2),
            rect_dT=rm.rect_dT,
            seed=seed,
            threads=threads,
        )
        csv_path = out_dir / "rectmap.csv"
        write_csv(csv_path, result.columns, result.rows)
        outputs.append(csv_path.name)
        meta = result.meta

    manifest = {
        "tool": "nessie",
        "version": __version__,
        "mode": cfg.mode,
        "config": str(config_path),
        "resolved": _jsonable(
            {
                "fixed": cfg.fixed,
                "observables": list(cfg.observables),
                "sweep": cfg.sweep,
                "cntd_objectives": list(cfg.cntd_objectives),
                "rectmap": cfg.rectmap,
            }
        ),
        "seed": seed,
        "seed_source": seed_source,
        "threads": threads,
        "wall_time_s": time.monotonic() - t0,
        "outputs": outputs,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        **{f"run_{k}": _jsonable(v) for k, v in meta.items()},
    }
    _atomic_write(out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nessie", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute a run configuration")
    run_p.add_argument("config", help="path to a TOML run configuration")
    run_p.add_argument("--output-dir", default=None, help="override the output directory")
    run_p.add_argument("--threads", type=int, default=1, help="worker pool size for sweeps")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1

    seed, seed_source = cfg.seed, "config"
    env_seed = os.environ.get(ENV_SEED)
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            print(f"config error: {ENV_SEED}: expected an integer, got {env_seed!r}", file=sys.stderr)
            return 1
        seed_source = "env"

    out_dir = Path(args.output_dir) if args.output_dir else Path(cfg.output_dir)
    try:
        return _run(cfg, Path(args.config), out_dir, args.threads, seed, seed_source)
    except NessieError as e:
        print(f"solver error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
