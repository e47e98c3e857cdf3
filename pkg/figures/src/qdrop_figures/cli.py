"""Command line: `qdrop-figures <recipe> RUN_DIR [RUN_DIR ...] -o image.png`."""

from __future__ import annotations

import argparse
import sys

from .recipes import RECIPES, FigureRecipe, render
from .runread import RunReadError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdrop-figures",
        description="Render figures from qdrop run directories",
    )
    parser.add_argument("recipe", choices=sorted(RECIPES))
    parser.add_argument("run_dirs", nargs="+", help="input run directories")
    parser.add_argument("-o", "--output", required=True, help="output image path")
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        recipe = FigureRecipe(
            name=args.recipe,
            run_dirs=tuple(args.run_dirs),
            output=args.output,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
        )
        out = render(recipe)
    except RunReadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
