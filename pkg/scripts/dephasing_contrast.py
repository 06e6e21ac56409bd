"""sigma_pm versus sigma_z coupling to the same spread of modes."""
import argparse

import numpy as np

from twolevel import ModeSet, TimeGrid, TwoLevelParams, TwoLevelState
from twolevel.dephasing import compare_models, dephasing_coherence
from twolevel.evolution import propagate
from twolevel.kernel import kernel_from_modes
from twolevel.volterra import solve_u


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modes", type=int, default=50)
    ap.add_argument("--g", type=float, default=0.04)
    ap.add_argument("--spacing", type=float, default=0.04)
    ap.add_argument("--t-max", type=float, default=40.0)
    ap.add_argument("--h", type=float, default=0.01)
    args = ap.parse_args()

    w = 1.0 + args.spacing * (np.arange(args.modes) - (args.modes - 1) / 2)
    m = ModeSet(w[w > 0], np.full((w > 0).sum(), args.g))
    grid = TimeGrid.from_step(args.t_max, args.h)
    s0 = TwoLevelState(0.5, 0.5)
    a = solve_u(kernel_from_modes(m), TwoLevelParams(1.0), grid)
    rep = compare_models(propagate(a, s0), dephasing_coherence(m, grid))
    for q, x, y in rep.table():
        fx = "-" if x is None else f"{x:.5g}"
        fy = "-" if y is None else f"{y:.5g}"
        print(f"{q:<28s} sigma_pm={fx:<10s} sigma_z={fy}")


if __name__ == "__main__":
    main()
