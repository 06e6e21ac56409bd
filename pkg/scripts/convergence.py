"""Volterra error against the pole expansion and the master-equation residual under step halving."""
import argparse

import numpy as np

from twolevel import ModeSet, TimeGrid, TwoLevelParams, TwoLevelState
from twolevel.evolution import master_equation_residual, propagate
from twolevel.kernel import LorentzianKernel, kernel_from_modes
from twolevel.volterra import solve_u, solve_u_laplace

KERNELS = {
    "lorentzian": LorentzianKernel(1.2, 0.5, 1.0),
    "modes": kernel_from_modes(ModeSet([0.8, 1.1, 1.4], [0.3, 0.2, 0.25])),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-max", type=float, default=10.0)
    ap.add_argument("--levels", type=int, default=5)
    args = ap.parse_args()
    p = TwoLevelParams(1.0)
    s0 = TwoLevelState(0.3, 0.2 + 0.1j)
    for name, k in KERNELS.items():
        print(name)
        prev = None
        for j in range(args.levels):
            grid = TimeGrid(args.t_max, 1000 * 2**j)
            a = solve_u(k, p, grid)
            err = np.max(np.abs(a.u - solve_u_laplace(k, p, grid).u))
            res = master_equation_residual(a, propagate(a, s0)).max()
            ratio = "" if prev is None else f"  ratio {prev[0] / err:5.2f} / {prev[1] / res:5.2f}"
            print(f"  h={grid.h:.2e}  err={err:.3e}  residual={res:.3e}{ratio}")
            prev = (err, res)


if __name__ == "__main__":
    main()
