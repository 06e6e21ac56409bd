"""Memory kernels mu(s) = sum_k g_k^2 exp(-i w_k s) and their continuum limits."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .core import (
    FlatBand,
    Lorentzian,
    ModelError,
    ModeSet,
    OhmicFamily,
    TimeGrid,
)

QUAD_EPSREL = 1e-9


class MemoryKernel:
    """Base class. Subclasses evaluate mu(s) and know their Laplace structure."""

    rational = False

    def __call__(self, s):
        raise NotImplementedError

    def sample(self, grid: TimeGrid) -> np.ndarray:
        return np.asarray(self(grid.times), dtype=complex)

    @property
    def mu0(self) -> float:
        return float(np.real(self(0.0)))

    def conjugate(self) -> "MemoryKernel":
        return ConjugateKernel(self)


@dataclass(frozen=True)
class ModeKernel(MemoryKernel):
    modes: ModeSet
    rational = True

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        g2 = self.modes.couplings**2
        phase = np.exp(-1j * np.multiply.outer(s, self.modes.omegas))
        return phase @ g2

    def laplace_terms(self):
        """(weights, rates): mu~(z) = sum weights / (z + rates)."""
        return self.modes.couplings**2 + 0j, 1j * self.modes.omegas


@dataclass(frozen=True)
class LorentzianKernel(MemoryKernel):
    """mu(s) = weight * exp(-width |s| - i center s)."""

    center: float
    width: float
    weight: float
    rational = True

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.weight * np.exp(-self.width * np.abs(s) - 1j * self.center * s)

    def laplace_terms(self):
        return np.array([self.weight + 0j]), np.array([self.width + 1j * self.center])


@dataclass(frozen=True)
class ZeroKernel(MemoryKernel):
    rational = True

    def __call__(self, s):
        return np.zeros(np.shape(s), dtype=complex)

    def laplace_terms(self):
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=complex)


@dataclass(frozen=True)
class ConjugateKernel(MemoryKernel):
    """mu*(s); drives the equation for u-bar."""

    base: MemoryKernel

    @property
    def rational(self):
        return self.base.rational

    def __call__(self, s):
        return np.conj(self.base(s))

    def sample(self, grid):
        return np.conj(self.base.sample(grid))

    def conjugate(self):
        return self.base

    def laplace_terms(self):
        # L[conj f](z) = conj(L[f](conj z)); for sum w/(z+r) this is sum conj(w)/(z+conj(r))
        w, r = self.base.laplace_terms()
        return np.conj(w), np.conj(r)


class SampledKernel(MemoryKernel):
    """mu(j h) on a uniform grid, j = 0..n_steps."""

    def __init__(self, grid: TimeGrid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (len(grid),):
            raise ModelError(
                f"sampled kernel has {values.shape[0]} values, grid needs {len(grid)}"
            )
        values.flags.writeable = False
        self.grid = grid
        self.values = values

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.rint(s / self.grid.h).astype(int)
        if np.any(np.abs(idx * self.grid.h - s) > 1e-9 * max(self.grid.h, 1.0)):
            raise ModelError("sampled kernel evaluated off its grid")
        if np.any(np.abs(idx) > self.grid.n_steps):
            raise ModelError("sampled kernel evaluated outside [-t_max, t_max]")
        vals = self.values[np.abs(idx)]
        return np.where(idx < 0, np.conj(vals), vals)

    def sample(self, grid: TimeGrid) -> np.ndarray:
        if not np.isclose(grid.h, self.grid.h, rtol=1e-12, atol=0):
            raise ModelError("sampled kernel step does not match the solver grid")
        if grid.n_steps > self.grid.n_steps:
            raise ModelError("sampled kernel shorter than the solver grid")
        return np.array(self.values[: len(grid)])

    def conjugate(self):
        return SampledKernel(self.grid, np.conj(self.values))


def kernel_from_modes(m: ModeSet) -> ModeKernel:
    if len(m) == 0:
        raise ModelError("empty environment")
    return ModeKernel(m)


def spectral_kernel_values(J, s) -> np.ndarray:
    """mu(s) = int J(w) exp(-i w s) dw by adaptive Gauss-Kronrod, vectorised over s.

    Integration runs over ``J.support()``: band edges for FlatBand, 40 widths
    either side for Lorentzian, [0, 60 cutoff] for OhmicFamily.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    lo, hi = J.support()
    # split into panels of bounded phase so the adaptive rule starts resolved
    s_max = float(np.max(np.abs(s))) if s.size else 0.0
    n_panels = int(min(4000, max(1, np.ceil((hi - lo) * s_max / (4 * np.pi)))))
    edges = np.linspace(lo, hi, n_panels + 1)
    total, _ = quad_vec(
        lambda w: J(w) * np.exp(-1j * w * s),
        lo,
        hi,
        epsrel=QUAD_EPSREL,
        epsabs=0,
        norm="max",
        points=edges[1:-1] if n_panels > 1 else None,
        limit=max(200, 4 * n_panels),
    )
    return np.asarray(total, dtype=complex)


def kernel_from_spectral_density(J, grid: TimeGrid) -> MemoryKernel:
    """Closed form for Lorentzian densities, quadrature-sampled kernel otherwise."""
    if isinstance(J, Lorentzian):
        return LorentzianKernel(J.center, J.width, J.weight)
    if not isinstance(J, (FlatBand, OhmicFamily)):
        raise ModelError(f"unsupported spectral density {type(J).__name__}")
    values = spectral_kernel_values(J, grid.times)
    if not np.all(np.isfinite(values)):
        raise ModelError("spectral density is not integrable")
    values[0] = values[0].real
    return SampledKernel(grid, values)


def discretize(J, n_modes: int, band: tuple[float, float] | None = None) -> ModeSet:
    """Midpoint discretisation: n_modes equally spaced modes with g_k^2 = J(w_k) dw."""
    lo, hi = band if band is not None else J.support()
    dw = (hi - lo) / n_modes
    w = lo + dw * (np.arange(n_modes) + 0.5)
    g = np.sqrt(np.asarray(J(w), dtype=float) * dw)
    return ModeSet(w, g)


@dataclass(frozen=True)
class CavityConfig:
    """1-d Dirichlet cavity between plates at 0 and L, atom at x_atom."""

    L: float
    x_atom: float
    coupling: float
    n_modes: int

    def __post_init__(self):
        if not self.L > 0:
            raise ModelError("cavity length L must be positive")
        if not 0 < self.x_atom < self.L:
            raise ModelError("x_atom must lie strictly between the plates (0 < x_atom < L)")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ModelError("n_modes must be an integer >= 1")


def cavity_mode_set(c: CavityConfig) -> ModeSet:
    """w_n = n pi / L, g_n = |coupling sin(n pi x / L)| / sqrt(w_n L), n = 1..N."""
    n = np.arange(1, int(c.n_modes) + 1)
    w = n * np.pi / c.L
    g = np.abs(c.coupling * np.sin(n * np.pi * c.x_atom / c.L) / np.sqrt(w * c.L))
    return ModeSet(w, g)
