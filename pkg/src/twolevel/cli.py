"""Command line: ``twolevel {run,validate,compare} CONFIG``.

Exit codes: 0 ok, 2 configuration error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import sys

from .config import ConfigError, expand_sweep, load_config, parse_scenario
from .core import ModelError, NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twolevel", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("run", "run every scenario in CONFIG"),
        ("validate", "check CONFIG without running solvers"),
        ("compare", "run CONFIG with model forced to 'both'"),
    ]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config")
        sp.add_argument("--out-dir", default="out")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--step-override", type=float, default=None, metavar="H")
    return p


def _render(summary) -> str:
    lines = []
    for r in summary["records"]:
        tag = r["name"] if "sweep_value" not in r else f"{r['name']}[{r['sweep_path']}={r['sweep_value']}]"
        parts = [f"{k}={r[k]:.6g}" for k in ("T1", "T2", "T1_over_T2", "Gamma_fit", "T2_sigma_z") if isinstance(r.get(k), float)]
        if r.get("local_max"):
            parts.append("local_max")
        if r.get("local_min"):
            parts.append("local_min")
        lines.append(f"{tag} ({r['model']}): " + " ".join(parts))
        for q, a, b in r.get("comparison", []):
            fa = "-" if a is None else f"{a:.6g}"
            fb = "-" if b is None else f"{b:.6g}"
            lines.append(f"    {q:<28s} sigma_pm={fa:<12s} sigma_z={fb}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.step_override is not None and not args.step_override > 0:
        print("error: --step-override must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        scenarios = load_config(args.config, args.step_override)
        if args.command == "compare":
            scenarios = [
                parse_scenario(dict(s.raw, model="both"), i, args.step_override)
                for i, s in enumerate(scenarios)
            ]
            for i, s in enumerate(scenarios):
                expand_sweep(s, i, args.step_override)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"ok: {len(scenarios)} scenario(s)")
        return EXIT_OK

    from .runner import run_scenarios

    try:
        summary = run_scenarios(scenarios, args.out_dir, args.threads, args.step_override)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ModelError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    print(_render(summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
