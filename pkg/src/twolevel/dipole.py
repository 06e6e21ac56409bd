"""sigma_z couplings generated one order beyond the dipole approximation.

Units: hbar = c = 1, so |k| = w_k. The remaining constants (charge, eps0,
quantisation volume) sit in ``AtomGeometry`` and enter only through

    c_k = -(e / m) (2 hbar w_k eps0 V)^(-1/2).

q1, q2, d12 and m must be given in one consistent unit system; q_i carries
units of length x momentum, so with hbar = 1 it is dimensionless.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import ModelError, ModeSet


@dataclass(frozen=True)
class AtomGeometry:
    q1: np.ndarray
    q2: np.ndarray
    d12: float
    m: float
    charge: float = 1.0
    eps0: float = 1.0
    volume: float = 1.0
    hbar: float = field(default=1.0)

    def __post_init__(self):
        q1 = np.asarray(self.q1, dtype=float)
        q2 = np.asarray(self.q2, dtype=float)
        if q1.shape != (3,) or q2.shape != (3,):
            raise ModelError("q1 and q2 must be 3-vectors")
        if not self.m > 0:
            raise ModelError("mass must be positive")
        if self.d12 < 0:
            raise ModelError("d12 must be non-negative")
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "q2", q2)


class RatioBound(NamedTuple):
    ratio: float
    bound: float


def mode_constant(geom: AtomGeometry, omega_k: float) -> float:
    return -(geom.charge / geom.m) / np.sqrt(2 * geom.hbar * omega_k * geom.eps0 * geom.volume)


def z_couplings(geom: AtomGeometry, k_vec, omega_k: float) -> tuple[float, float]:
    """(g1k, g2k) = (g11k - g22k, g11k + g22k) with g_iik = c_k k.q_i."""
    k_vec = np.asarray(k_vec, dtype=float)
    c = mode_constant(geom, omega_k)
    g11 = c * float(k_vec @ geom.q1)
    g22 = c * float(k_vec @ geom.q2)
    return g11 - g22, g11 + g22


def coupling_ratio_bound(geom: AtomGeometry, k_vec, omega_k: float) -> RatioBound:
    """|k.(q1 - q2)| / (m w_k d12) and its Cauchy-Schwarz bound |k| |q1 - q2| / (m w_k d12)."""
    if geom.d12 == 0:
        raise ModelError("degenerate dipole")
    k_vec = np.asarray(k_vec, dtype=float)
    dq = geom.q1 - geom.q2
    denom = geom.m * omega_k * geom.d12
    ratio = abs(float(k_vec @ dq)) / denom
    bound = float(np.linalg.norm(k_vec) * np.linalg.norm(dq)) / denom
    return RatioBound(ratio, bound)


def dephasing_modes(geom: AtomGeometry, k_vecs, dipole_couplings) -> ModeSet:
    """ModeSet for the dephasing model: sigma_z coupling |g_k| x ratio for each mode.

    Mode frequencies are |k| (c = 1).
    """
    k_vecs = np.atleast_2d(np.asarray(k_vecs, dtype=float))
    gk = np.abs(np.asarray(dipole_couplings, dtype=float))
    omegas = np.linalg.norm(k_vecs, axis=1)
    ratios = np.array([coupling_ratio_bound(geom, k, w).ratio for k, w in zip(k_vecs, omegas)])
    return ModeSet(omegas, gk * ratios)
