"""Brute-force evolutions in truncated Hilbert spaces.

These share no code path with the Volterra solver: the single-excitation
amplitude comes from a dense eigendecomposition of the atom+modes Hamiltonian,
the Jaynes-Cummings dynamics from the atom x Fock space, and the sigma_z
coherence from explicit branch evolution on truncated oscillators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from .core import ModelError, ModeSet, TimeGrid, TwoLevelParams, TwoLevelState
from .volterra import Amplitude

DENSE_LIMIT = 2500


@dataclass(frozen=True)
class SingleExcitationSystem:
    """H[0,0] = w0, H[j,j] = w_j, H[0,j] = H[j,0] = g_j on |e,vac>, |g,1_j>."""

    hamiltonian: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.hamiltonian)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ModelError("hamiltonian must be square")
        if not np.allclose(H, H.conj().T, atol=1e-14, rtol=0):
            raise ModelError("hamiltonian must be hermitian")

    @classmethod
    def from_modes(cls, params: TwoLevelParams, m: ModeSet) -> "SingleExcitationSystem":
        K = len(m)
        H = np.zeros((K + 1, K + 1))
        H[0, 0] = params.omega0
        H[np.arange(1, K + 1), np.arange(1, K + 1)] = m.omegas
        H[0, 1:] = m.couplings
        H[1:, 0] = m.couplings
        return cls(H)

    @property
    def dimension(self) -> int:
        return self.hamiltonian.shape[0]


def single_excitation_evolve(sys: SingleExcitationSystem, grid: TimeGrid) -> Amplitude:
    """u(t) = <e,vac| exp(-iHt) |e,vac> by eigendecomposition."""
    evals, vecs = np.linalg.eigh(sys.hamiltonian)
    weights = np.abs(vecs[0]) ** 2
    t = grid.times
    u = np.empty(len(t), dtype=complex)
    du = np.empty(len(t), dtype=complex)
    # chunk the time axis to bound memory for long grids
    for lo in range(0, len(t), 4096):
        ph = np.exp(-1j * np.outer(t[lo : lo + 4096], evals))
        u[lo : lo + 4096] = ph @ weights
        du[lo : lo + 4096] = ph @ (-1j * evals * weights)
    return Amplitude(grid, u, du, float(np.real(sys.hamiltonian[0, 0])))


def single_excitation_state(sys: SingleExcitationSystem, t) -> np.ndarray:
    """Full state vectors exp(-iHt)|e,vac>, shape (len(t), dim)."""
    evals, vecs = np.linalg.eigh(sys.hamiltonian)
    c = vecs.conj()[0]
    t = np.atleast_1d(t)
    return (np.exp(-1j * np.outer(t, evals)) * c) @ vecs.T


# ---------------------------------------------------------------- Jaynes-Cummings


@dataclass(frozen=True)
class Fock:
    n: int


@dataclass(frozen=True)
class Coherent:
    n_bar: float


@dataclass(frozen=True)
class JCConfig:
    g: float
    omega0: float
    omega_c: float
    field_state: Fock | Coherent
    fock_cutoff: int

    def __post_init__(self):
        fs = self.field_state
        if isinstance(fs, Fock):
            if fs.n < 0 or self.fock_cutoff < fs.n + 1:
                raise ModelError("fock_cutoff must be >= n + 1 for a Fock field")
        elif isinstance(fs, Coherent):
            if fs.n_bar < 0 or self.fock_cutoff < fs.n_bar + 8 * math.sqrt(fs.n_bar):
                raise ModelError("fock_cutoff must be >= n_bar + 8 sqrt(n_bar) for a coherent field")
        else:
            raise ModelError("field_state must be Fock or Coherent")


@dataclass(frozen=True)
class JCResult:
    grid: TimeGrid
    P_e: np.ndarray
    inversion: np.ndarray
    excitations: np.ndarray
    norm: np.ndarray


def field_amplitudes(fs: Fock | Coherent, cutoff: int) -> np.ndarray:
    c = np.zeros(cutoff + 1, dtype=complex)
    if isinstance(fs, Fock):
        c[fs.n] = 1.0
        return c
    n = np.arange(cutoff + 1)
    logc = -fs.n_bar / 2 + n * (0.5 * math.log(fs.n_bar) if fs.n_bar > 0 else 0.0)
    logc -= 0.5 * np.array([math.lgamma(k + 1) for k in n])
    c = np.exp(logc).astype(complex)
    if fs.n_bar == 0:
        c[:] = 0
        c[0] = 1
    return c / np.linalg.norm(c)


def jc_hamiltonian(c: JCConfig) -> np.ndarray:
    """Atom (excited first) x Fock(0..cutoff), atom index major."""
    N = c.fock_cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, N)), 1)
    num = np.diag(np.arange(N, dtype=float))
    sz = np.diag([0.5, -0.5])
    sp = np.array([[0, 1], [0, 0]], dtype=float)
    H = c.omega0 * np.kron(sz, np.eye(N)) + c.omega_c * np.kron(np.eye(2), num)
    H = H + c.g * (np.kron(sp, a) + np.kron(sp.T, a.T))
    return H


def jc_evolve(c: JCConfig, grid: TimeGrid) -> JCResult:
    """Atom starts excited; returns P_e(t), W(t) = P_e - P_g, <a^+a + S+S-> and the norm."""
    N = c.fock_cutoff + 1
    H = jc_hamiltonian(c)
    psi0 = np.concatenate([field_amplitudes(c.field_state, c.fock_cutoff), np.zeros(N)])
    evals, vecs = np.linalg.eigh(H)
    coeff = vecs.conj().T @ psi0
    t = grid.times
    n_exc = np.concatenate([np.arange(N) + 1.0, np.arange(N, dtype=float)])
    P_e = np.empty(len(t))
    exc = np.empty(len(t))
    norm = np.empty(len(t))
    for lo in range(0, len(t), 2048):
        psi = (np.exp(-1j * np.outer(t[lo : lo + 2048], evals)) * coeff) @ vecs.T
        prob = np.abs(psi) ** 2
        P_e[lo : lo + 2048] = prob[:, :N].sum(axis=1)
        exc[lo : lo + 2048] = prob @ n_exc
        norm[lo : lo + 2048] = prob.sum(axis=1)
    return JCResult(grid, P_e, 2 * P_e - norm, exc, norm)


def rabi_frequency(t, inversion) -> float:
    """Omega for W(t) = cos(2 Omega t), from equally spaced zero crossings of W."""
    t = np.asarray(t)
    w = np.asarray(inversion)
    idx = np.nonzero(np.signbit(w[:-1]) != np.signbit(w[1:]))[0]
    if idx.size < 2:
        raise ModelError("fewer than two zero crossings; extend the grid")
    # cubic interpolation through four samples around each sign change
    zeros = []
    for i in idx:
        j = int(np.clip(i - 1, 0, len(t) - 4))
        tt, ww = t[j : j + 4], w[j : j + 4]
        coef = np.polyfit(tt - t[i], ww, 3)
        roots = np.roots(coef)
        roots = roots[np.isreal(roots)].real + t[i]
        roots = roots[(roots >= t[i]) & (roots <= t[i + 1])]
        zeros.append(roots[0] if roots.size else t[i] - w[i] * (t[i + 1] - t[i]) / (w[i + 1] - w[i]))
    zeros = np.array(zeros)
    spacing = np.polyfit(np.arange(zeros.size), zeros, 1)[0]
    return float(np.pi / (2 * spacing))


def moving_rms_envelope(t, w, width) -> np.ndarray:
    """sqrt(2) x centred moving RMS; equals the amplitude of a steady sinusoid."""
    h = t[1] - t[0]
    n = max(1, int(round(width / h)))
    kern = np.ones(n) / n
    ms = np.convolve(np.asarray(w) ** 2, kern, mode="same")
    # renormalise the partially covered windows at the ends
    cover = np.convolve(np.ones(len(w)), kern, mode="same")
    return np.sqrt(2 * ms / cover)


@dataclass(frozen=True)
class CollapseRevival:
    revival_time: float
    predicted_revival: float
    collapse_min_envelope: float
    collapsed: bool
    envelope: np.ndarray


def collapse_revival(t, inversion, g: float, n_bar: float) -> CollapseRevival:
    """Revival = envelope argmax in [0.5, 1.5] x 2 pi sqrt(n_bar)/g (moving RMS of width 4 pi/g).

    Collapse = envelope below 10% of |W(0)| somewhere before half the revival time.
    """
    t = np.asarray(t)
    t_r = 2 * math.pi * math.sqrt(n_bar) / g
    env = moving_rms_envelope(t, inversion, 4 * math.pi / g)
    win = (t >= 0.5 * t_r) & (t <= 1.5 * t_r)
    if not np.any(win):
        raise ModelError("grid does not cover the revival window")
    i = np.argmax(np.where(win, env, -np.inf))
    early = (t > 0) & (t < 0.5 * t_r)
    low = float(env[early].min())
    return CollapseRevival(float(t[i]), t_r, low, low < 0.1 * abs(inversion[0]), env)


# ---------------------------------------------------------------- sigma_z oracle


def _branch_hamiltonian(m: ModeSet, cutoff: int, lam_sign: float, scale: float):
    N = cutoff + 1
    K = len(m)
    a = sparse.diags(np.sqrt(np.arange(1, N)), 1, format="csr")
    num = sparse.diags(np.arange(N, dtype=float), 0, format="csr")
    eye = sparse.identity(N, format="csr")
    H = sparse.csr_matrix((N**K, N**K))
    for k, (w, g) in enumerate(m):
        ops_n = [eye] * K
        ops_x = [eye] * K
        ops_n[k] = num
        ops_x[k] = a + a.T
        term_n, term_x = ops_n[0], ops_x[0]
        for j in range(1, K):
            term_n = sparse.kron(term_n, ops_n[j], format="csr")
            term_x = sparse.kron(term_x, ops_x[j], format="csr")
        H = H + w * term_n + lam_sign * scale * g * term_x
    return H


def _evolve_vacuum(H, t):
    dim = H.shape[0]
    psi0 = np.zeros(dim, dtype=complex)
    psi0[0] = 1.0
    if dim <= DENSE_LIMIT:
        evals, vecs = np.linalg.eigh(H.toarray())
        c = vecs.conj()[0]
        return (np.exp(-1j * np.outer(t, evals)) * c) @ vecs.T
    # uniform grid starting at 0: expm_multiply returns every sample
    return expm_multiply(-1j * H, psi0, start=t[0], stop=t[-1], num=len(t), endpoint=True)


def dephasing_oracle(
    m: ModeSet,
    fock_cutoff: int,
    grid: TimeGrid,
    initial: TwoLevelState | None = None,
    z_coupling_scale: float = 1.0,
) -> np.ndarray:
    """|rho_eg(t)| from explicit evolution of the sigma_z = +1 and -1 field branches."""
    if len(m) > 3:
        raise ModelError("oracle limited to small environments (K <= 3)")
    if fock_cutoff < 30:
        raise ModelError("dephasing oracle needs fock_cutoff >= 30")
    s0 = initial if initial is not None else TwoLevelState(0.5, 0.5)
    t = grid.times
    psi_p = _evolve_vacuum(_branch_hamiltonian(m, fock_cutoff, +1.0, z_coupling_scale), t)
    psi_m = _evolve_vacuum(_branch_hamiltonian(m, fock_cutoff, -1.0, z_coupling_scale), t)
    overlap = np.einsum("ti,ti->t", psi_m.conj(), psi_p)
    return abs(s0.y) * np.abs(overlap)
