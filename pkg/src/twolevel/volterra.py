"""Survival amplitude u(t) of the excited level and the rates Gamma(t), Omega(t).

u solves

    du/dt = -i w0 u(t) - int_0^t mu(t - s) u(s) ds,   u(0) = 1.

Two routes: trapezoidal product integration on a uniform grid (any kernel),
and the exact pole expansion of 1 / (z + i w0 + mu~(z)) (rational kernels).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NumericalError, TimeGrid, TwoLevelParams
from .kernel import MemoryKernel

U_FLOOR = 1e-8
MAX_PHASE_STEP = 0.5


@dataclass(frozen=True)
class Amplitude:
    """u(t) and du/dt on ``grid``; ``du`` comes from the equation, not differencing."""

    grid: TimeGrid
    u: np.ndarray
    du: np.ndarray
    omega0: float = 0.0  # bare atomic frequency, used to demodulate when differencing

    @property
    def times(self):
        return self.grid.times

    @property
    def abs_u(self):
        return np.abs(self.u)

    def conj(self) -> "Amplitude":
        return Amplitude(self.grid, np.conj(self.u), np.conj(self.du), -self.omega0)


@dataclass(frozen=True)
class RateFunctions:
    """Gamma + i Omega = du/u; ``mask`` is True where |u| < floor and rates are undefined."""

    grid: TimeGrid
    gamma: np.ndarray
    omega: np.ndarray
    mask: np.ndarray


def check_resolution(kernel: MemoryKernel, params: TwoLevelParams, grid: TimeGrid):
    scale = max(abs(params.omega0), math.sqrt(max(kernel.mu0, 0.0)))
    if grid.h * scale > MAX_PHASE_STEP:
        raise NumericalError(
            f"grid under-resolves dynamics: h * max(omega0, sqrt(mu(0))) = {grid.h * scale:.3g} > {MAX_PHASE_STEP}"
        )


def solve_u(
    kernel: MemoryKernel, params: TwoLevelParams, grid: TimeGrid, *, sign: int = -1
) -> Amplitude:
    """Trapezoidal product integration with the diagonal term taken implicitly.

    The free phase exp(-i w0 t) is factored out exactly: with u = exp(-i w0 t) v,
    v obeys the same equation with kernel mu(s) exp(i w0 s) and no frequency term.
    ``sign=+1`` solves the conjugate equation (kernel mu*, +i w0), whose solution
    is conj(u).
    """
    check_resolution(kernel, params, grid)
    n = grid.n_steps
    h = grid.h
    t = grid.times
    w0 = params.omega0 if sign == -1 else -params.omega0
    mu = kernel.sample(grid) if sign == -1 else kernel.conjugate().sample(grid)
    k = mu * np.exp(1j * w0 * t)
    # rev[i] = k[n - i]; k[m - j] for j = 1..m-1 is the slice rev[n-m+1 : n]
    rev = np.ascontiguousarray(k[::-1])

    v = np.empty(n + 1, dtype=complex)
    dv = np.empty(n + 1, dtype=complex)
    v[0] = 1.0
    dv[0] = 0.0
    diag = 1.0 + 0.25 * h * h * k[0]
    for m in range(1, n + 1):
        tail = 0.5 * k[m] * v[0]
        if m > 1:
            tail += np.dot(rev[n - m + 1 : n], v[1:m])
        tail *= h
        v[m] = (v[m - 1] + 0.5 * h * (dv[m - 1] - tail)) / diag
        dv[m] = -tail - 0.5 * h * k[0] * v[m]

    phase = np.exp(-1j * w0 * t)
    u = phase * v
    du = phase * (dv - 1j * w0 * v)
    return Amplitude(grid, u, du, w0)


def solve_u_bar(kernel: MemoryKernel, params: TwoLevelParams, grid: TimeGrid) -> Amplitude:
    """Solve the conjugate equation d(ub)/dt = +i w0 ub - int mu*(t-s) ub(s) ds."""
    return solve_u(kernel, params, grid, sign=+1)


# ---------------------------------------------------------------- Laplace route


def _poly_from_roots(roots):
    return np.poly(roots) if len(roots) else np.array([1.0 + 0j])


def _group_roots(roots, tol):
    """Cluster numerically repeated roots; returns [(root, multiplicity)]."""
    groups: list[list[complex]] = []
    for r in roots:
        for grp in groups:
            if abs(grp[0] - r) <= tol * max(1.0, abs(r)):
                grp.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def laplace_terms(kernel: MemoryKernel):
    """(weights, rates) with mu~(z) = sum w_k / (z + r_k), zero weights dropped, equal rates merged."""
    if not getattr(kernel, "rational", False) or not hasattr(kernel, "laplace_terms"):
        raise NumericalError("unsupported kernel for Laplace path")
    weights, rates = kernel.laplace_terms()
    merged: dict[complex, complex] = {}
    for wt, r in zip(weights, rates):
        if wt == 0:
            continue
        key = complex(r)
        merged[key] = merged.get(key, 0) + wt
    rates = np.array(list(merged.keys()), dtype=complex)
    weights = np.array(list(merged.values()), dtype=complex)
    return weights, rates


def laplace_polynomials(kernel: MemoryKernel, params: TwoLevelParams):
    """N, D with 1/(z + i w0 + mu~(z)) = N(z)/D(z), as numpy coefficient arrays."""
    weights, rates = laplace_terms(kernel)
    num = _poly_from_roots(-rates)
    den = np.polymul([1.0, 1j * params.omega0], num)
    for k in range(len(rates)):
        den = np.polyadd(den, weights[k] * _poly_from_roots(np.delete(-rates, k)))
    return num, den


def _secular_poles(weights, rates, omega0):
    """Poles for purely oscillatory terms (r_k = i w_k, w_k > 0).

    With z = -i lam the pole condition is f(lam) = lam - w0 - sum g2_k / (lam - w_k) = 0;
    f increases between consecutive w_k, so each gap holds exactly one root.
    """
    from scipy.optimize import brentq

    w = rates.imag
    order = np.argsort(w)
    w, g2 = w[order], weights.real[order]

    def f(lam):
        return lam - omega0 - np.sum(g2 / (lam - w))

    brackets = [(np.nextafter(a, np.inf), np.nextafter(b, -np.inf)) for a, b in zip(w[:-1], w[1:])]
    spread = abs(omega0 - w[0]) + abs(omega0 - w[-1]) + np.sqrt(g2.sum()) + 1.0
    lo = w[0] - spread
    while f(lo) > 0:
        lo -= spread
    hi = w[-1] + spread
    while f(hi) < 0:
        hi += spread
    brackets = [(lo, np.nextafter(w[0], -np.inf))] + brackets + [(np.nextafter(w[-1], np.inf), hi)]
    lams = []
    for a, b in brackets:
        fa, fb = f(a), f(b)
        if fa >= 0:
            lams.append(a)
        elif fb <= 0:
            lams.append(b)
        else:
            lams.append(brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))
    return -1j * np.array(lams)


def _newton_polish(d, dd, roots, iters=8):
    out = []
    for r in roots:
        for _ in range(iters):
            step = d(r) / dd(r)
            if not np.isfinite(step):
                break
            r = r - step
            if abs(step) < 1e-16 * max(1.0, abs(r)):
                break
        out.append(r)
    return np.array(out)


def solve_u_laplace(
    kernel: MemoryKernel, params: TwoLevelParams, grid: TimeGrid, *, root_tol: float = 1e-7
) -> Amplitude:
    """u(t) = sum over poles p of exp(p t) Res[1 / (z + i w0 + mu~(z)), p].

    Simple poles carry residue 1 / D'(p) with D(z) = z + i w0 + mu~(z); clustered
    poles fall back to a Laurent expansion of the rational function N/D.
    """
    weights, rates = laplace_terms(kernel)

    def d(z):
        return z + 1j * params.omega0 + np.sum(weights / (z + rates))

    def dd(z):
        return 1.0 - np.sum(weights / (z + rates) ** 2)

    oscillatory = len(rates) > 0 and np.all(rates.real == 0) and np.all(rates.imag > 0) and np.all(
        (weights.imag == 0) & (weights.real > 0)
    )
    if oscillatory:
        poles = _secular_poles(weights, rates, params.omega0)
        groups = [(p, 1) for p in poles]
    else:
        num, den = laplace_polynomials(kernel, params)
        poles = np.roots(den)
        groups = _group_roots(poles, root_tol)
        if all(m == 1 for _, m in groups):
            groups = [(p, 1) for p in _newton_polish(d, dd, [p for p, _ in groups])]

    t = grid.times
    u = np.zeros(len(t), dtype=complex)
    du = np.zeros(len(t), dtype=complex)
    if all(m == 1 for _, m in groups):
        for p, _ in groups:
            res = 1.0 / dd(p)
            e = np.exp(p * t)
            u += res * e
            du += res * p * e
        return _pin_origin(grid, u, du, params.omega0)

    num, den = laplace_polynomials(kernel, params)
    for p, mult in groups:
        # (z - p)^m N/D = N/Q near p, Q = lead * prod over the other poles
        others = [q for q, m in groups if q != p for _ in range(m)]
        q_poly = den[0] * _poly_from_roots(others)
        coeffs = _laurent_coeffs(num, q_poly, p, mult)
        e = np.exp(p * t)
        for j, c in enumerate(coeffs):
            # c / (z - p)^(m - j)  ->  c t^k / k! e^{pt},  k = m - j - 1
            k = mult - j - 1
            u += c * t**k / math.factorial(k) * e
            dterm = p * t**k / math.factorial(k)
            if k > 0:
                dterm = dterm + t ** (k - 1) / math.factorial(k - 1)
            du += c * dterm * e
    return _pin_origin(grid, u, du, params.omega0)


def _pin_origin(grid, u, du, omega0):
    # residues sum to 1 analytically; remove the rounding at t = 0
    u[0] = 1.0
    return Amplitude(grid, u, du, omega0)


def _laurent_coeffs(num, q_poly, p, mult):
    """Taylor coefficients of N/Q about p, orders 0..mult-1."""

    def taylor(poly, order):
        coeffs = []
        cur = np.asarray(poly, dtype=complex)
        for j in range(order):
            coeffs.append(np.polyval(cur, p) / math.factorial(j))
            cur = np.polyder(cur) if len(cur) > 1 else np.array([0j])
        return np.array(coeffs)

    a = taylor(num, mult)
    b = taylor(q_poly, mult)
    c = np.zeros(mult, dtype=complex)
    for j in range(mult):
        c[j] = (a[j] - np.dot(b[1 : j + 1][::-1], c[:j])) / b[0]
    return c


# ---------------------------------------------------------------- rates


def rates_from_u(a: Amplitude, u_floor: float = U_FLOOR) -> RateFunctions:
    mask = np.abs(a.u) < u_floor
    ratio = np.full(a.u.shape, np.nan + 0j)
    ok = ~mask
    ratio[ok] = a.du[ok] / a.u[ok]
    return RateFunctions(a.grid, ratio.real.copy(), ratio.imag.copy(), mask)
