#!/usr/bin/env python3
"""Regenerate the transit spectrum family: two front speeds (10 and 1
recoil units), three edge positions (+0.5, 0, -0.5 wavelengths), six CSV
files plus a Lorentzian reference column in each."""

import argparse
import sys

from nsse import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="fig1", help="output directory")
    ap.add_argument("--preset", default="default", choices=sorted(cli.PRESETS),
                    help="quadrature preset")
    ns = ap.parse_args()
    return cli.main(["spectrum", "--preset", ns.preset, "--out", ns.out])


if __name__ == "__main__":
    sys.exit(main())
