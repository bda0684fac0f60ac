#!/usr/bin/env python3
"""Angular cuts for three front speeds, each taken at the instant the
front edge sits half a wavelength past the packet center."""

import argparse
import os
import sys

from nsse import cli

SPEEDS = (0.1, 1.0, 10.0)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="fig3", help="output directory")
    ap.add_argument("--preset", default="default", choices=sorted(cli.PRESETS),
                    help="quadrature preset")
    ns = ap.parse_args()
    os.makedirs(ns.out, exist_ok=True)
    for v in SPEEDS:
        name = f"fig3_v{v:g}".replace(".", "p") + ".csv"
        rc = cli.main([
            "angular",
            "--v", f"{v:g}",
            "--edge-z", "-0.5",
            "--preset", ns.preset,
            "--out", os.path.join(ns.out, name),
        ])
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
