#!/usr/bin/env python3
"""Sweep the resolvent growth function m_alpha over a geometric eta ladder.

Writes a CSV of certified [m_lower, m_upper] brackets and prints the
log-log slope fitted across the ladder.

Example:
    python scripts/growth_sweep.py --surd 2 --eta-max 1e4 --points 7 \
        --out growth_sqrt2.csv
"""

import argparse
import sys

import numpy as np

from phstab import contfrac as cf
from phstab import spectral as sp


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    group = ap.add_mutually_exclusive_group(required=True)
    group.add_argument("--surd", type=int, metavar="D",
                       help="alpha = sqrt(D)")
    group.add_argument("--decimal", metavar="DIGITS",
                       help="decimal literal, certified to --bits bits")
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--eta-min", type=float, default=10.0)
    ap.add_argument("--eta-max", type=float, default=1e4)
    ap.add_argument("--points", type=int, default=7)
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--out", default="growth.csv")
    args = ap.parse_args()

    if args.surd is not None:
        alpha = cf.QuadraticSurd(D=args.surd)
    else:
        alpha = cf.DecimalLiteral(digits=args.decimal, bits=args.bits)

    etas = list(np.geomspace(args.eta_min, args.eta_max, args.points))
    curve = sp.growth_curve(alpha, etas, tol=args.tol)
    with open(args.out, "w") as fh:
        fh.write(curve.to_csv())

    mids = [0.5 * (p.m_lower + p.m_upper) for p in curve.points]
    slope = float(np.polyfit(np.log(etas), np.log(mids), 1)[0])
    for p in curve.points:
        print(f"eta={p.eta:>10.1f}  m in [{p.m_lower:.6g}, {p.m_upper:.6g}]"
              f"  witness t={p.witness:.6f}")
    print(f"log-log slope: {slope:.4f}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
