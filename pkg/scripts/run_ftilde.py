#!/usr/bin/env python3
"""First-order approximation of the first-moment curve, one CSV per run.

Writes (lambda, F_tilde, R) rows for a panel of rates; render the panels
with `plots ftilde <csv>`.
"""

import argparse

import numpy as np

from gtsearch import f_tilde


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rates", default="0.75,0.85,0.9,0.975",
                    help="comma-separated rates in (1/2, 1)")
    ap.add_argument("--points", type=int, default=1000)
    ap.add_argument("--out", default="ftilde.csv")
    args = ap.parse_args()

    rates = [float(x) for x in args.rates.split(",")]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("lambda,F_tilde,R\n")
        for rate in rates:
            for lam in np.linspace(0.0, 0.9, args.points):
                fh.write(f"{lam:.12g},{f_tilde(float(lam), rate):.12g},{rate:.10g}\n")
    print(f"wrote {args.out} ({len(rates)} curves x {args.points} points)")


if __name__ == "__main__":
    main()
