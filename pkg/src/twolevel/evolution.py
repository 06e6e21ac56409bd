"""Density-matrix propagation driven by u(t), emission probability, the
operator master-equation consistency check, and T1/T2 extraction.

The exact map (excited level first) is

    [[1 - x, y], [y*, x]]  ->  [[|u|^2 (1 - x), u y], [conj(u y), 1 - |u|^2 (1 - x)]]
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .core import SPIN, NumericalError, TimeGrid, TwoLevelState
from .volterra import Amplitude, rates_from_u

INV_E = float(np.exp(-1.0))
FIT_QUALITY_MIN = 0.99


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    rho_ee: np.ndarray
    rho_eg: np.ndarray
    frame: float = 0.0  # bare atomic frequency carried over from the amplitude

    @property
    def times(self):
        return self.grid.times

    @property
    def rho_gg(self):
        return 1.0 - self.rho_ee

    @property
    def abs_rho_eg(self):
        return np.abs(self.rho_eg)

    @property
    def purity(self):
        return self.rho_ee**2 + self.rho_gg**2 + 2 * np.abs(self.rho_eg) ** 2

    @property
    def emission(self):
        """1 - rho_ee(t)/rho_ee(0); equals the ground population for an excited start."""
        ee0 = self.rho_ee[0]
        if ee0 <= 0:
            return np.full(self.rho_ee.shape, np.nan)
        return 1.0 - self.rho_ee / ee0

    @property
    def det(self):
        return self.rho_ee * self.rho_gg - np.abs(self.rho_eg) ** 2

    @property
    def states(self) -> list[TwoLevelState]:
        return [TwoLevelState(1.0 - a, b) for a, b in zip(self.rho_ee, self.rho_eg)]

    def matrices(self) -> np.ndarray:
        out = np.empty((len(self.rho_ee), 2, 2), dtype=complex)
        out[:, 0, 0] = self.rho_ee
        out[:, 0, 1] = self.rho_eg
        out[:, 1, 0] = np.conj(self.rho_eg)
        out[:, 1, 1] = self.rho_gg
        return out


@dataclass(frozen=True)
class Timescales:
    T1: float | None
    T2: float | None
    Gamma_fit: float
    fit_quality: float

    @property
    def T1_over_T2(self):
        if self.T1 is None or self.T2 is None:
            return None
        return self.T1 / self.T2

    @property
    def fit_reliable(self) -> bool:
        return self.fit_quality > FIT_QUALITY_MIN


def propagate(a: Amplitude, s0: TwoLevelState) -> Trajectory:
    s0.validate()
    ee = np.abs(a.u) ** 2 * (1.0 - s0.x)
    eg = a.u * s0.y
    return Trajectory(a.grid, ee, eg, a.omega0)


def emission_probability(a: Amplitude) -> np.ndarray:
    return 1.0 - np.abs(a.u) ** 2


def markov_trajectory(grid: TimeGrid, s0: TwoLevelState, gamma: float, omega: float) -> Trajectory:
    """Constant-rate solution of the master equation (same literal rate convention)."""
    t = grid.times
    ee = (1.0 - s0.x) * np.exp(2 * gamma * t)
    eg = s0.y * np.exp((gamma + 1j * omega) * t)
    return Trajectory(grid, ee, eg, -omega)


# ---------------------------------------------------------------- master equation


def master_equation_rhs(rho, gamma, omega, sign: int):
    """-i[H, rho] + G {S+S-, rho} - 2 G S- rho S+ with H = sign * Omega * S+S-.

    ``rho`` has shape (n, 2, 2); gamma/omega have shape (n,).
    """
    P = SPIN.splus @ SPIN.sminus
    sm, sp = SPIN.sminus, SPIN.splus
    H = sign * omega[:, None, None] * P
    comm = H @ rho - rho @ H
    anti = P @ rho + rho @ P
    jump = sm @ rho @ sp
    g = gamma[:, None, None]
    return -1j * comm + g * anti - 2 * g * jump


def trajectory_derivative(traj: Trajectory) -> np.ndarray:
    """d rho/dt by second-order differences (central inside, one-sided at the ends).

    The coherence is differenced in the frame rotating at ``traj.frame`` and the
    exact phase derivative added back, so pure free rotation differentiates exactly.
    """
    h = traj.grid.h
    t = traj.times
    dee = np.gradient(traj.rho_ee, h, edge_order=2)
    rot = np.exp(1j * traj.frame * t)
    c = traj.rho_eg * rot
    deg = (np.gradient(c, h, edge_order=2) - 1j * traj.frame * c) / rot
    out = np.empty((len(t), 2, 2), dtype=complex)
    out[:, 0, 0] = dee
    out[:, 0, 1] = deg
    out[:, 1, 0] = np.conj(deg)
    out[:, 1, 1] = -dee
    return out


def _residual_with_sign(a: Amplitude, traj: Trajectory, sign: int) -> np.ndarray:
    rates = rates_from_u(a)
    ok = ~rates.mask
    if not np.any(ok):
        return np.zeros(0)
    drho = trajectory_derivative(traj)[ok]
    rhs = master_equation_rhs(traj.matrices()[ok], rates.gamma[ok], rates.omega[ok], sign)
    return np.max(np.abs(drho - rhs), axis=(1, 2))


@functools.lru_cache(maxsize=None)
def hamiltonian_sign() -> int:
    """Global sign s in H(t) = s * Omega(t) S+S- that makes the master equation consistent.

    Fixed by requiring a vanishing residual for free evolution and for a single
    resonant mode, both with exact analytic u. Gamma enters with its literal sign.
    """
    grid = TimeGrid(2.0, 4000)
    t = grid.times
    w0, g = 1.3, 0.7
    s0 = TwoLevelState(0.5, 0.5)
    cases = [
        Amplitude(grid, np.exp(-1j * w0 * t), -1j * w0 * np.exp(-1j * w0 * t), w0),
        Amplitude(
            grid,
            np.exp(-1j * w0 * t) * np.cos(g * t),
            np.exp(-1j * w0 * t) * (-1j * w0 * np.cos(g * t) - g * np.sin(g * t)),
            w0,
        ),
    ]
    best = None
    for sign in (+1, -1):
        worst = max(_residual_with_sign(a, propagate(a, s0), sign).max() for a in cases)
        if best is None or worst < best[1]:
            best = (sign, worst)
    sign, worst = best
    if worst > 1e-5:
        raise NumericalError("no global Hamiltonian sign makes the master equation consistent")
    return sign


def master_equation_residual(a: Amplitude, traj: Trajectory) -> np.ndarray:
    """Pointwise max-norm of (d rho/dt) - RHS on unmasked points; empty if all masked."""
    return _residual_with_sign(a, traj, hamiltonian_sign())


# ---------------------------------------------------------------- timescales


def _first_crossing(t, ratio, level):
    """First time ``ratio`` <= level, interpolated linearly in log(ratio)."""
    below = np.nonzero(ratio <= level)[0]
    if below.size == 0:
        return None
    i = below[0]
    if i == 0:
        return float(t[0])
    r0, r1 = ratio[i - 1], ratio[i]
    if r1 <= 0:
        frac = (r0 - level) / (r0 - r1)
    else:
        l0, l1, lv = np.log(r0), np.log(r1), np.log(level)
        frac = (l0 - lv) / (l0 - l1)
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))


def survival_modulus(traj: Trajectory) -> np.ndarray:
    """|u(t)| recovered from the trajectory (population if excited weight, else coherence)."""
    ee0 = traj.rho_ee[0]
    if ee0 > 0:
        return np.sqrt(np.clip(traj.rho_ee / ee0, 0.0, None))
    y0 = abs(traj.rho_eg[0])
    if y0 > 0:
        return np.abs(traj.rho_eg) / y0
    raise NumericalError("insufficient decay in window: initial state has no excited weight")


def fit_decay_rate(t, abs_u, start=np.exp(-0.2), stop=np.exp(-4.0)):
    """Least-squares slope of log|u| over the window where |u|^2 falls from ``start`` to ``stop``.

    Returns (rate, R^2) with rate = -slope. If |u|^2 never reaches ``start`` the
    whole record is fitted.
    """
    u2 = abs_u**2
    i0 = np.argmax(u2 <= start) if np.any(u2 <= start) else 0
    after = np.nonzero(u2[i0:] <= stop)[0]
    i1 = i0 + after[0] if after.size else len(t) - 1
    if i1 - i0 < 3:
        i0, i1 = 0, len(t) - 1
    tt = t[i0 : i1 + 1]
    y = np.log(np.clip(abs_u[i0 : i1 + 1], 1e-300, None))
    A = np.vstack([tt, np.ones_like(tt)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * tt + icpt)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 0.0
    return float(-slope), float(min(max(r2, 0.0), 1.0))


def extract_timescales(traj: Trajectory) -> Timescales:
    t = traj.times
    ee0 = traj.rho_ee[0]
    y0 = abs(traj.rho_eg[0])
    T1 = _first_crossing(t, traj.rho_ee / ee0, INV_E) if ee0 > 0 else None
    T2 = _first_crossing(t, np.abs(traj.rho_eg) / y0, INV_E) if y0 > 0 else None
    if (ee0 > 0 and T1 is None) or (ee0 <= 0 and T2 is None):
        raise NumericalError("insufficient decay in window")
    gamma, quality = fit_decay_rate(t, survival_modulus(traj))
    return Timescales(T1, T2, gamma, quality)
