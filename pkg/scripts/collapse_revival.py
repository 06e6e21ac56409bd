"""Jaynes-Cummings inversion for a coherent field; writes t, W, envelope as CSV."""
import argparse
import csv
import sys

from twolevel import TimeGrid
from twolevel.oracle import Coherent, JCConfig, collapse_revival, jc_evolve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-bar", type=float, default=20.0)
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--omega", type=float, default=10.0)
    ap.add_argument("--cutoff", type=int, default=60)
    ap.add_argument("--t-max", type=float, default=60.0)
    ap.add_argument("--n-steps", type=int, default=30000)
    ap.add_argument("--csv", help="write the series here")
    args = ap.parse_args()

    grid = TimeGrid(args.t_max, args.n_steps)
    cfg = JCConfig(args.g, args.omega, args.omega, Coherent(args.n_bar), args.cutoff)
    res = jc_evolve(cfg, grid)
    cr = collapse_revival(grid.times, res.inversion, args.g, args.n_bar)
    print(f"revival at t = {cr.revival_time:.3f} (2 pi sqrt(n_bar)/g = {cr.predicted_revival:.3f})", file=sys.stderr)
    print(f"collapse envelope minimum {cr.collapse_min_envelope:.2e}, collapsed = {cr.collapsed}", file=sys.stderr)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "inversion", "envelope"])
            for row in zip(grid.times, res.inversion, cr.envelope):
                w.writerow([repr(float(x)) for x in row])


if __name__ == "__main__":
    main()
