"""Pure dephasing under sigma_z coupling to the same field modes.

H = w0 Sz + sum_k w_k b_k^+ b_k + s sigma_z sum_k g_k (b_k + b_k^+),  s = z_coupling_scale.

The two atomic branches drive each mode into opposite displaced vacua, so the
coherence is multiplied by the overlap of the branch field states while the
populations never change.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelError, ModeSet, NumericalError, TimeGrid, TwoLevelState
from .evolution import INV_E, Trajectory, _first_crossing, extract_timescales

Z_SCALES = (1.0, 0.5)


@dataclass(frozen=True)
class DephasingResult:
    grid: TimeGrid
    coherence_magnitude: np.ndarray
    phase: np.ndarray
    population_drift: float

    @property
    def overlap(self) -> np.ndarray:
        return self.coherence_magnitude * np.exp(1j * self.phase)

    def trajectory(self, s0: TwoLevelState, omega0: float = 0.0) -> Trajectory:
        t = self.grid.times
        ee = np.full(len(t), s0.rho_ee)
        eg = s0.y * np.exp(-1j * omega0 * t) * self.overlap
        return Trajectory(self.grid, ee, eg, omega0)


def branch_displacement(lam, omega, t):
    """Coherent amplitude and phase reached from vacuum under w b^+b + lam (b + b^+)."""
    alpha = (lam / omega) * (np.exp(-1j * omega * t) - 1.0)
    phi = (lam / omega) ** 2 * (omega * t - np.sin(omega * t))
    return alpha, phi


def dephasing_coherence(
    m: ModeSet, grid: TimeGrid, z_coupling_scale: float = 1.0
) -> DephasingResult:
    """D(t) = exp(-sum_k 4 s^2 g_k^2 / w_k^2 (1 - cos w_k t)) and the branch phase."""
    if z_coupling_scale not in Z_SCALES:
        raise ModelError(f"z_coupling_scale must be one of {Z_SCALES}")
    if np.any(m.omegas == 0):
        raise NumericalError("zero-frequency mode unsupported")
    t = grid.times[:, None]
    lam = z_coupling_scale * m.couplings[None, :]
    w = m.omegas[None, :]
    a_plus, phi_plus = branch_displacement(lam, w, t)
    a_minus, phi_minus = branch_displacement(-lam, w, t)
    # log <a_-|a_+> for coherent states, plus the relative dynamical phase
    log_ov = (
        -0.5 * np.abs(a_plus) ** 2
        - 0.5 * np.abs(a_minus) ** 2
        + np.conj(a_minus) * a_plus
        + 1j * (phi_plus - phi_minus)
    ).sum(axis=1)
    D = np.exp(log_ov.real)
    phase = log_ov.imag
    return DephasingResult(grid, D, phase, 0.0)


def decoherence_exponent(m: ModeSet, t, z_coupling_scale: float = 1.0):
    """The closed-form exponent sum_k 4 s^2 g_k^2/w_k^2 (1 - cos w_k t)."""
    t = np.asarray(t, dtype=float)[..., None]
    c = 4 * z_coupling_scale**2 * m.couplings**2 / m.omegas**2
    return (c * (1 - np.cos(m.omegas * t))).sum(axis=-1)


def coherence_time(t, magnitude) -> float | None:
    return _first_crossing(np.asarray(t), np.asarray(magnitude), INV_E)


@dataclass(frozen=True)
class ComparisonReport:
    T2_sigma_pm: float | None
    T1_sigma_pm: float | None
    T2_sigma_z: float | None
    population_drift_sigma_z: float
    Gamma_fit_sigma_pm: float | None
    fit_quality_sigma_pm: float | None

    def table(self) -> list[tuple[str, object, object]]:
        """Rows (quantity, sigma_pm, sigma_z) as rendered by the CLI."""

        def ratio(a, b):
            return None if a is None or b is None or b == 0 else a / b

        return [
            ("coherence 1/e time", self.T2_sigma_pm, self.T2_sigma_z),
            ("population 1/e time", self.T1_sigma_pm, None),
            ("T1/T2", ratio(self.T1_sigma_pm, self.T2_sigma_pm), None),
            ("population drift", None, self.population_drift_sigma_z),
            ("T2(sigma_pm)/T2(sigma_z)", ratio(self.T2_sigma_pm, self.T2_sigma_z), None),
        ]

    def as_dict(self) -> dict:
        return {
            "T2_sigma_pm": self.T2_sigma_pm,
            "T1_sigma_pm": self.T1_sigma_pm,
            "T2_sigma_z": self.T2_sigma_z,
            "population_drift_sigma_z": self.population_drift_sigma_z,
            "Gamma_fit_sigma_pm": self.Gamma_fit_sigma_pm,
            "fit_quality_sigma_pm": self.fit_quality_sigma_pm,
        }


def compare_models(sigma_pm: Trajectory, sigma_z: DephasingResult) -> ComparisonReport:
    if sigma_pm.grid != sigma_z.grid:
        raise ModelError("sigma_pm and sigma_z results live on different grids")
    try:
        ts = extract_timescales(sigma_pm)
        T1, T2, gam, q = ts.T1, ts.T2, ts.Gamma_fit, ts.fit_quality
    except NumericalError:
        T1 = T2 = gam = q = None
    return ComparisonReport(
        T2_sigma_pm=T2,
        T1_sigma_pm=T1,
        T2_sigma_z=coherence_time(sigma_z.grid.times, sigma_z.coherence_magnitude),
        population_drift_sigma_z=sigma_z.population_drift,
        Gamma_fit_sigma_pm=gam,
        fit_quality_sigma_pm=q,
    )
