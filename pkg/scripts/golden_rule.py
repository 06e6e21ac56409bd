"""Fitted decay rate against pi J(omega0) for flat bands of increasing width."""
import argparse

import numpy as np

from twolevel import FlatBand, TimeGrid, TwoLevelParams, TwoLevelState
from twolevel.evolution import extract_timescales, propagate
from twolevel.kernel import kernel_from_spectral_density
from twolevel.volterra import solve_u


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega0", type=float, default=5.0)
    ap.add_argument("--rate", type=float, default=0.1, help="target pi J(omega0)")
    ap.add_argument("--t-max", type=float, default=40.0)
    ap.add_argument("--n-steps", type=int, default=4000)
    args = ap.parse_args()

    coupling = np.sqrt(args.rate / np.pi)
    grid = TimeGrid(args.t_max, args.n_steps)
    print(f"{'half_width':>10} {'Gamma_fit':>10} {'rel_err':>8} {'T1/T2':>7} {'R^2':>7}")
    for hw in (1.0, 2.0, 4.0, 4.9):
        J = FlatBand(args.omega0 - hw, args.omega0 + hw, 1.0, coupling)
        a = solve_u(kernel_from_spectral_density(J, grid), TwoLevelParams(args.omega0), grid)
        ts = extract_timescales(propagate(a, TwoLevelState(0.5, 0.5)))
        rel = ts.Gamma_fit / args.rate - 1
        print(f"{hw:10.2f} {ts.Gamma_fit:10.5f} {rel:8.2%} {ts.T1_over_T2:7.4f} {ts.fit_quality:7.4f}")


if __name__ == "__main__":
    main()
