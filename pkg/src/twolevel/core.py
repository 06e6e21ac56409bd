"""Shared value types: atom parameters, field modes, spectral densities,
time grids, two-level states and the fixed spin matrices.

Units: hbar = c = 1; every frequency and rate is an angular frequency in one
common unit. Basis ordering everywhere: index 0 is the excited level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

STATE_TOL = 1e-12


class ModelError(ValueError):
    """An input violates a type invariant (bad frequency, state, grid...)."""


class NumericalError(RuntimeError):
    """A numerical precondition failed (under-resolved grid, no decay...)."""


@dataclass(frozen=True)
class TwoLevelParams:
    omega0: float

    def __post_init__(self):
        if not (np.isfinite(self.omega0) and self.omega0 > 0):
            raise ModelError(f"omega0 must be positive, got {self.omega0!r}")


@dataclass(frozen=True)
class ModeSet:
    """Discrete field modes with real couplings.

    ``omegas[k]`` and ``couplings[k]`` are the frequency and coupling of mode k.
    """

    omegas: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omegas)
        g = np.asarray(self.couplings)
        if w.ndim != 1 or g.shape != w.shape:
            raise ModelError("omegas and couplings must be 1-d arrays of equal length")
        if w.size == 0:
            raise ModelError("empty environment")
        if np.iscomplexobj(w) or np.iscomplexobj(g):
            if np.any(np.imag(g) != 0):
                raise ModelError("couplings must be real")
            if np.any(np.imag(w) != 0):
                raise ModelError("mode frequencies must be real")
        w = np.real(w).astype(float)
        g = np.real(g).astype(float)
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(g)):
            raise ModelError("mode parameters must be finite")
        if np.any(w <= 0):
            raise ModelError("mode frequencies must be positive")
        w.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "couplings", g)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "ModeSet":
        pairs = list(pairs)
        if not pairs:
            raise ModelError("empty environment")
        w, g = zip(*pairs)
        return cls(np.array(w), np.array(g))

    def __len__(self):
        return self.omegas.size

    def __iter__(self):
        return iter(zip(self.omegas.tolist(), self.couplings.tolist()))


# ---------------------------------------------------------------- spectral densities


@dataclass(frozen=True)
class Lorentzian:
    """J(w) = weight * (width/pi) / ((w - center)^2 + width^2), on the whole real line."""

    center: float
    width: float
    weight: float

    def __post_init__(self):
        if not self.width > 0:
            raise ModelError("Lorentzian width must be positive")
        if not self.weight >= 0:
            raise ModelError("Lorentzian weight must be non-negative")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self.weight * (self.width / np.pi) / ((w - self.center) ** 2 + self.width**2)

    def support(self) -> tuple[float, float]:
        return (self.center - 40 * self.width, self.center + 40 * self.width)


@dataclass(frozen=True)
class FlatBand:
    """J(w) = density * coupling**2 on [omega_min, omega_max], zero outside."""

    omega_min: float
    omega_max: float
    density: float
    coupling: float

    def __post_init__(self):
        if not self.omega_min < self.omega_max:
            raise ModelError("FlatBand requires omega_min < omega_max")
        if self.omega_min < 0:
            raise ModelError("FlatBand omega_min must be non-negative")
        if not self.density >= 0:
            raise ModelError("FlatBand density must be non-negative")

    @property
    def level(self) -> float:
        return self.density * self.coupling**2

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        inside = (w >= self.omega_min) & (w <= self.omega_max)
        return np.where(inside, self.level, 0.0)

    def support(self) -> tuple[float, float]:
        return (self.omega_min, self.omega_max)


@dataclass(frozen=True)
class OhmicFamily:
    """J(w) = scale * cutoff * (w/cutoff)**exponent * exp(-w/cutoff) for w > 0.

    exponent 1 is ohmic, > 1 supraohmic, < 1 subohmic.
    """

    exponent: float
    scale: float
    cutoff: float

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ModelError("OhmicFamily cutoff must be positive")
        if not self.scale >= 0:
            raise ModelError("OhmicFamily scale must be non-negative")
        if not self.exponent > -1:
            # J ~ w**n is not integrable at 0 for n <= -1
            raise ModelError("OhmicFamily exponent must exceed -1 (non-integrable density)")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        x = np.clip(w, 0.0, None) / self.cutoff
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.scale * self.cutoff * x**self.exponent * np.exp(-x)
        return np.where(w > 0, val, 0.0)

    def support(self) -> tuple[float, float]:
        return (0.0, 60.0 * self.cutoff)


SpectralDensity = Lorentzian | FlatBand | OhmicFamily


# ---------------------------------------------------------------- grids and states


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    n_steps: int

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ModelError("n_steps must be an integer >= 2")
        if not (np.isfinite(self.t_max) and self.t_max > 0):
            raise ModelError("t_max must be positive")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @classmethod
    def from_step(cls, t_max: float, h: float) -> "TimeGrid":
        if not h > 0:
            raise ModelError("step must be positive")
        return cls(t_max, max(2, int(round(t_max / h))))

    @property
    def h(self) -> float:
        return self.t_max / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.h

    def __len__(self):
        return self.n_steps + 1

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t_max, self.n_steps * factor)


@dataclass(frozen=True)
class TwoLevelState:
    """rho = [[1 - x, y], [conj(y), x]] with the excited level first.

    x is the ground population, y the excited-ground coherence.
    """

    x: float
    y: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", complex(self.y))

    @classmethod
    def excited(cls) -> "TwoLevelState":
        return cls(0.0, 0j)

    @classmethod
    def ground(cls) -> "TwoLevelState":
        return cls(1.0, 0j)

    @classmethod
    def from_matrix(cls, rho) -> "TwoLevelState":
        rho = np.asarray(rho)
        return cls(float(np.real(rho[1, 1])), complex(rho[0, 1]))

    @property
    def rho_ee(self) -> float:
        return 1.0 - self.x

    @property
    def rho_eg(self) -> complex:
        return self.y

    @property
    def det(self) -> float:
        return self.x * (1.0 - self.x) - abs(self.y) ** 2

    def matrix(self) -> np.ndarray:
        return np.array([[1.0 - self.x, self.y], [np.conj(self.y), self.x]], dtype=complex)

    def validate(self) -> "TwoLevelState":
        if not validate_state(self):
            raise ModelError(f"invalid two-level state x={self.x}, y={self.y}")
        return self


def validate_state(s: TwoLevelState, tol: float = STATE_TOL) -> bool:
    """True iff 0 <= x <= 1 and x(1-x) - |y|^2 >= 0, within ``tol``."""
    if not (math.isfinite(s.x) and math.isfinite(s.y.real) and math.isfinite(s.y.imag)):
        return False
    if s.x < -tol or s.x > 1 + tol:
        return False
    return s.det >= -tol


# ---------------------------------------------------------------- spin matrices


@dataclass(frozen=True)
class SpinOperators:
    """Constant 2x2 matrices in the (excited, ground) basis."""

    sz: np.ndarray = field(default_factory=lambda: np.diag([0.5, -0.5]).astype(complex))
    splus: np.ndarray = field(default_factory=lambda: np.array([[0, 1], [0, 0]], dtype=complex))
    sminus: np.ndarray = field(default_factory=lambda: np.array([[0, 0], [1, 0]], dtype=complex))
    sigma_z: np.ndarray = field(default_factory=lambda: np.diag([1.0, -1.0]).astype(complex))
    sigma_x: np.ndarray = field(default_factory=lambda: np.array([[0, 1], [1, 0]], dtype=complex))
    sigma_y: np.ndarray = field(default_factory=lambda: np.array([[0, -1j], [1j, 0]], dtype=complex))


SPIN = SpinOperators()
