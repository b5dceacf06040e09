"""Command line: render one figure recipe against a data directory."""

from __future__ import annotations

import argparse
import sys

from .recipes import RecipeError, SchemaMismatch, load_recipe
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="figures")
    sub = parser.add_subparsers(dest="command", required=True)
    rend = sub.add_parser("render", help="render a figure recipe from CSV data")
    rend.add_argument("recipe", help="path to a recipe JSON file")
    rend.add_argument("--in", dest="in_dir", required=True, help="directory holding the input CSVs")
    rend.add_argument("--out", dest="out_dir", required=True, help="directory for the rendered image")
    args = parser.parse_args(argv)

    try:
        recipe = load_recipe(args.recipe)
    except RecipeError as e:
        print(f"recipe error: {e}", file=sys.stderr)
        return 1
    try:
        out = render(recipe, args.in_dir, args.out_dir)
    except SchemaMismatch as e:
        print(f"schema mismatch: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"render error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
