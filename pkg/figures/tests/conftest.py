"""Fixtures: generate reduced-resolution datasets through the nessie CLI.

The figures package consumes only the CSV schema, so the fixture drives the
primary tool as a subprocess (its public interface), shrinking the shipped
run configurations' grid sizes to keep the suite fast. The recipe files
under docs/recipes are used exactly as shipped.
"""

import re
import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
RECIPES_DIR = REPO_ROOT / "docs" / "recipes"

MAX_POINTS = 5
SWEEP_RESTARTS = 12


def _shrink(text: str) -> str:
    text = re.sub(
        r"(points\d* = )(\d+)",
        lambda m: f"{m.group(1)}{min(int(m.group(2)), MAX_POINTS)}",
        text,
    )
    return re.sub(r"restarts = \d+", f"restarts = {SWEEP_RESTARTS}", text)


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory) -> Path:
    """All shipped datasets at reduced resolution, one directory per config."""
    base = tmp_path_factory.mktemp("data")
    cfg_dir = tmp_path_factory.mktemp("configs")
    for cfg in sorted(RECIPES_DIR.glob("*.toml")):
        reduced = cfg_dir / cfg.name
        reduced.write_text(_shrink(cfg.read_text()))
        out = base / cfg.stem
        proc = subprocess.run(
            [
                sys.executable, "-m", "nessie.cli", "run", str(reduced),
                "--output-dir", str(out), "--threads", "2",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, f"{cfg.name}: {proc.stderr}"
    return base


@pytest.fixture(scope="session")
def recipe_paths() -> list[Path]:
    paths = sorted(RECIPES_DIR.glob("*.json"))
    assert paths, f"no shipped recipes found under {RECIPES_DIR}"
    return paths
