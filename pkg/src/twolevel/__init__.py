"""Exact zero-temperature dynamics of a two-level atom coupled to a bosonic field.

Survival amplitude u(t) from the memory-kernel Volterra equation, the density
matrix map it induces, the sigma_z dephasing contrast model, and brute-force
oracles that certify both.
"""
from .core import (
    SPIN,
    FlatBand,
    Lorentzian,
    ModelError,
    ModeSet,
    NumericalError,
    OhmicFamily,
    SpinOperators,
    TimeGrid,
    TwoLevelParams,
    TwoLevelState,
    validate_state,
)
from .kernel import (
    CavityConfig,
    LorentzianKernel,
    MemoryKernel,
    ModeKernel,
    SampledKernel,
    ZeroKernel,
    cavity_mode_set,
    discretize,
    kernel_from_modes,
    kernel_from_spectral_density,
)
from .volterra import Amplitude, RateFunctions, rates_from_u, solve_u, solve_u_bar, solve_u_laplace
from .evolution import (
    Timescales,
    Trajectory,
    emission_probability,
    extract_timescales,
    master_equation_residual,
    propagate,
)
from .dephasing import DephasingResult, compare_models, dephasing_coherence

__version__ = "0.1.0"
