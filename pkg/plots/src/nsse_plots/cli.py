"""Batch figure renderer: nsse-plot --figure fig1 --csv ... --out ..."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURES, FigureRecipe, render_outputs
from .schema import SchemaError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nsse-plot",
        description="Render simulator CSV datasets into figures. An --out "
                    "ending in .png or .svg writes that one file; a bare "
                    "stem writes both formats.")
    p.add_argument("--figure", required=True, choices=FIGURES,
                   help="which recipe to render")
    p.add_argument("--csv", required=True, nargs="+", metavar="PATH",
                   help="input CSV file(s), overlay order preserved")
    p.add_argument("--out", required=True, help="output image path or stem")
    p.add_argument("--styles",
                   help="comma-separated matplotlib line styles overriding "
                        "the defaults, cycled over curves; names like "
                        "'solid,dashed' avoid shell trouble with leading "
                        "dashes (or use --styles='-,--')")
    p.add_argument("--dpi", type=int, default=150, help="raster resolution")
    return p


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    styles: tuple[str, ...] = ()
    if ns.styles:
        styles = tuple(s.strip() for s in ns.styles.split(",") if s.strip())
    try:
        recipe = FigureRecipe(figure=ns.figure, csv_paths=tuple(ns.csv),
                              out_path=ns.out, styles=styles, dpi=ns.dpi)
        written = render_outputs(recipe)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
