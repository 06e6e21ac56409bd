"""Execute scenarios and serialise their time series and summaries."""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .config import CSV_COLUMNS, Scenario, expand_sweep
from .core import ModeSet, NumericalError
from .dephasing import coherence_time, compare_models, dephasing_coherence
from .evolution import (
    extract_timescales,
    fit_decay_rate,
    hamiltonian_sign,
    propagate,
    survival_modulus,
)
from .kernel import CavityConfig, kernel_from_modes, kernel_from_spectral_density
from .oracle import Coherent, SingleExcitationSystem, collapse_revival, jc_evolve, rabi_frequency, single_excitation_evolve
from .volterra import Amplitude, rates_from_u, solve_u, solve_u_laplace

SIGMA_Z_COLUMNS = ("t", "D", "phase", "rho_ee", "rho_eg_re", "rho_eg_im")
JC_COLUMNS = ("t", "P_e", "inversion", "excitations")
EXTREMA_PROMINENCE = 0.1


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if np.isnan(x):
        return "nan"
    return repr(x)


def _csv_text(columns, rows_by_col) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    n = len(rows_by_col[columns[0]])
    cols = [rows_by_col[c] for c in columns]
    for i in range(n):
        w.writerow([_fmt(c[i]) for c in cols])
    return buf.getvalue()


def _clean(x):
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    x = float(x)
    return None if not np.isfinite(x) else x


def build_kernel(sc: Scenario):
    env = sc.environment
    if isinstance(env, (ModeSet, CavityConfig)):
        return kernel_from_modes(sc.mode_set)
    return kernel_from_spectral_density(env, sc.grid)


def sigma_pm_amplitude(sc: Scenario) -> Amplitude:
    if sc.model == "single_excitation_oracle":
        return single_excitation_evolve(SingleExcitationSystem.from_modes(sc.atom, sc.mode_set), sc.grid)
    kernel = build_kernel(sc)
    if sc.solver == "laplace":
        return solve_u_laplace(kernel, sc.atom, sc.grid)
    return solve_u(kernel, sc.atom, sc.grid)


def sigma_pm_columns(a: Amplitude, traj) -> dict:
    rates = rates_from_u(a)
    return {
        "t": a.grid.times,
        "u_re": a.u.real,
        "u_im": a.u.imag,
        "abs_u": np.abs(a.u),
        "P_emission": traj.emission,
        "rho_ee": traj.rho_ee,
        "rho_eg_re": traj.rho_eg.real,
        "rho_eg_im": traj.rho_eg.imag,
        "gamma_t": rates.gamma,
        "omega_t": rates.omega,
        "masked": rates.mask.astype(int),
    }


def timescale_fields(traj) -> dict:
    """T1, T2, Gamma_fit, fit_quality from a trajectory; None where undefined."""
    out = {"T1": None, "T2": None, "T1_over_T2": None, "Gamma_fit": None, "fit_quality": None, "fit_reliable": None}
    try:
        ts = extract_timescales(traj)
        out.update(T1=ts.T1, T2=ts.T2, T1_over_T2=ts.T1_over_T2, Gamma_fit=ts.Gamma_fit,
                   fit_quality=ts.fit_quality, fit_reliable=ts.fit_reliable)
    except NumericalError:
        # no 1/e crossing: still report the fitted rate of log|u|
        try:
            gam, q = fit_decay_rate(traj.times, survival_modulus(traj))
            out.update(Gamma_fit=gam, fit_quality=q, fit_reliable=q > 0.99)
        except NumericalError:
            pass
    return {k: _clean(v) for k, v in out.items()}


@dataclass
class PointResult:
    files: dict  # filename -> csv text
    record: dict


def run_point(sc: Scenario, stem: str) -> PointResult:
    record = {"name": sc.name, "model": sc.model, "environment_digest": sc.environment_digest}
    files = {}
    if sc.model in ("sigma_pm", "both", "single_excitation_oracle"):
        a = sigma_pm_amplitude(sc)
        traj = propagate(a, sc.initial)
        cols = sigma_pm_columns(a, traj)
        files[f"{stem}.csv"] = _csv_text(list(sc.outputs), cols)
        record.update(timescale_fields(traj))
    if sc.model in ("sigma_z", "both"):
        dres = dephasing_coherence(sc.mode_set, sc.grid, sc.z_coupling_scale)
        ztraj = dres.trajectory(sc.initial, sc.atom.omega0)
        zcols = {
            "t": sc.grid.times,
            "D": dres.coherence_magnitude,
            "phase": dres.phase,
            "rho_ee": ztraj.rho_ee,
            "rho_eg_re": ztraj.rho_eg.real,
            "rho_eg_im": ztraj.rho_eg.imag,
        }
        files[f"{stem}_sigma_z.csv"] = _csv_text(list(SIGMA_Z_COLUMNS), zcols)
        record["T2_sigma_z"] = _clean(coherence_time(sc.grid.times, dres.coherence_magnitude))
        record["population_drift_sigma_z"] = float(np.max(np.abs(ztraj.rho_ee - ztraj.rho_ee[0])))
        if sc.model == "both":
            rep = compare_models(traj, dres)
            record["comparison"] = [[q, _clean(a_), _clean(b_)] for q, a_, b_ in rep.table()]
    if sc.model == "jc_oracle":
        jc = sc.jc_config()
        res = jc_evolve(jc, sc.grid)
        files[f"{stem}_jc.csv"] = _csv_text(
            list(JC_COLUMNS),
            {"t": sc.grid.times, "P_e": res.P_e, "inversion": res.inversion, "excitations": res.excitations},
        )
        if isinstance(jc.field_state, Coherent):
            cr = collapse_revival(sc.grid.times, res.inversion, jc.g, jc.field_state.n_bar)
            record.update(revival_time=cr.revival_time, predicted_revival=cr.predicted_revival,
                          collapsed=bool(cr.collapsed))
        else:
            try:
                record["rabi_frequency"] = rabi_frequency(sc.grid.times, res.inversion)
            except ValueError:
                record["rabi_frequency"] = None
            record["predicted_rabi_frequency"] = float(jc.g * np.sqrt(jc.field_state.n + 1))
    return PointResult(files, record)


def _run_indexed(args):
    sc, stem, sweep_index, value = args
    res = run_point(sc, stem)
    if sweep_index is not None:
        res.record.update(sweep_path=sc.sweep.path, sweep_index=sweep_index, sweep_value=value)
    return res


def flag_extrema(values) -> tuple[list[bool], list[bool]]:
    """Local maxima/minima of a sweep series, keeping only features with prominence
    >= 10% of the series range."""
    v = np.array([np.nan if x is None else x for x in values], dtype=float)
    finite = np.isfinite(v)
    vmax = np.zeros(len(v), bool)
    vmin = np.zeros(len(v), bool)
    if finite.sum() < 3:
        return vmax.tolist(), vmin.tolist()
    filled = np.where(finite, v, np.nanmin(v))
    span = float(np.nanmax(v) - np.nanmin(v))
    if span <= 0:
        return vmax.tolist(), vmin.tolist()
    pk, _ = find_peaks(filled, prominence=EXTREMA_PROMINENCE * span)
    tr, _ = find_peaks(-filled, prominence=EXTREMA_PROMINENCE * span)
    vmax[pk] = True
    vmin[tr] = True
    return vmax.tolist(), vmin.tolist()


def run_scenarios(scenarios: list[Scenario], out_dir, threads: int = 1, step_override=None) -> dict:
    """Run everything, write CSVs and ``summary.json`` into ``out_dir``; returns the summary."""
    os.makedirs(out_dir, exist_ok=True)
    jobs = []
    for i, sc in enumerate(scenarios):
        points = expand_sweep(sc, i, step_override)
        if sc.sweep is None:
            jobs.append((sc, sc.name, None, None))
        else:
            for j, (pt, val) in enumerate(zip(points, sc.sweep.values)):
                jobs.append((pt, f"{sc.name}__{j:03d}", j, val))

    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_run_indexed, jobs))
    else:
        results = [_run_indexed(j) for j in jobs]

    records = []
    for res in results:
        for fname, text in res.files.items():
            with open(os.path.join(out_dir, fname), "w", newline="") as fh:
                fh.write(text)
        records.append(res.record)

    # extrema flags per swept scenario, in sweep order
    for sc in scenarios:
        if sc.sweep is None:
            continue
        recs = [r for r in records if r["name"] == sc.name]
        key = "Gamma_fit" if "Gamma_fit" in recs[0] else "T2_sigma_z"
        mx, mn = flag_extrema([r.get(key) for r in recs])
        for r, a, b in zip(recs, mx, mn):
            r["extrema_of"] = key
            r["local_max"] = a
            r["local_min"] = b

    summary = {
        "conventions": {
            "basis": "index 0 = excited level",
            "gamma_t": "Re(du/dt / u); negative while the excited level decays",
            "omega_t": "Im(du/dt / u)",
            "hamiltonian_sign": hamiltonian_sign(),
            "master_equation": "d rho/dt = -i[H, rho] + G{S+S-, rho} - 2G S- rho S+, H = hamiltonian_sign * Omega * S+S-",
            "Gamma_fit": "-slope of log|u| where |u|^2 falls from exp(-0.2) to exp(-4); reliable when fit_quality > 0.99",
        },
        "records": records,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# ---------------------------------------------------------------- recomputation


def read_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    out = {}
    for j, name in enumerate(header):
        out[name] = np.array([float(r[j]) if r[j] != "" else np.nan for r in body])
    return out


def summary_from_csv(path) -> dict:
    """Recompute the timescale fields of a sigma_pm CSV (needs t, rho_ee, rho_eg_*)."""
    from .core import TimeGrid
    from .evolution import Trajectory

    d = read_csv(path)
    t = d["t"]
    grid = TimeGrid(float(t[-1]), len(t) - 1)
    traj = Trajectory(grid, d["rho_ee"], d["rho_eg_re"] + 1j * d["rho_eg_im"])
    return timescale_fields(traj)


__all__ = [
    "CSV_COLUMNS",
    "flag_extrema",
    "read_csv",
    "run_point",
    "run_scenarios",
    "summary_from_csv",
]
