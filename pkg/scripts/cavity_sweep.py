"""Gamma_fit across cavity lengths; prints the sweep with detected extrema."""
import argparse
from pathlib import Path

from twolevel.config import load_config
from twolevel.runner import run_scenarios

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs" / "cavity_sweep.toml"))
    ap.add_argument("--out-dir", default="out/cavity")
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    summary = run_scenarios(load_config(args.config), args.out_dir, args.threads)
    for r in summary["records"]:
        flag = "max" if r["local_max"] else "min" if r["local_min"] else ""
        gam = r["Gamma_fit"]
        q = r["fit_quality"]
        print(f"L={r['sweep_value']:.4f}  Gamma_fit={gam:+.5f}  R^2={q:.3f}  {flag}")


if __name__ == "__main__":
    main()
