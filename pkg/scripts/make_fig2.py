#!/usr/bin/env python3
"""Time-angle emission surface for a slow front.

Sweeps the reduced angular distribution over the full transit window
(-50 to +40 natural lifetimes, 91 time rows by 61 angles by default) at
the recoil speed.  This is the expensive dataset: with the relaxed
quadrature preset it needs under an hour on one core, and parallelism
helps (set NSSE_THREADS).  Thin the grid with --t-points/--theta-points
for a quick look.
"""

import argparse
import sys

from nsse import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="fig2.csv", help="output CSV path")
    ap.add_argument("--v", type=float, default=1.0,
                    help="front speed in recoil units")
    ap.add_argument("--preset", default="relaxed", choices=sorted(cli.PRESETS),
                    help="quadrature preset (relaxed is the intended one)")
    ap.add_argument("--t-points", type=int, default=91)
    ap.add_argument("--theta-points", type=int, default=61)
    ns = ap.parse_args()
    return cli.main([
        "angular",
        "--v", f"{ns.v:g}",
        "--preset", ns.preset,
        "--t-points", str(ns.t_points),
        "--theta-points", str(ns.theta_points),
        "--out", ns.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
