"""Traveling-wave toolkit for the gravity-capillary Whitham equation.

Computes solitary waves of depression for strong surface tension,
generalized solitary waves (localized core plus an asymptotically small
periodic ripple) for weak surface tension, the small-amplitude periodic
wave family, and the modulational stability map of the far-field states,
with a verification suite for the scaling laws each construction obeys.
"""

from .backend import BACKEND
from .depression import DepressionWave, remainder_scaling, solve_depression
from .dispersion import (
    BondParams,
    K_eps,
    ScalingParams,
    k_crit,
    l_eps,
    m_beta,
    m_beta_derivs,
    nondimensionalize,
    phase_speed_min,
)
from .kdv import KdvProfile, j0, kdv_residual, s0_apply, s0_solve, sigma_beta, sigma_hat
from .modstab import (
    StabilityMap,
    StabilitySample,
    classify,
    delta_bf,
    delta_mi,
    mechanisms,
    stability_map,
)
from .nanopteron import (
    BealeWorkspace,
    NanopteronSolution,
    PhysicalWave,
    beale_iterate,
    direct_newton_step,
    full_residual,
    l_inv,
    make_workspace,
    profile_residual,
    project,
    s_eps_solve,
    unscale,
)
from .periodic import PeriodicWave, periodic_residual, sample_on_grid, solve_periodic
from .spectral import Grid, SpectralField, WeightedNorm, load_field, save_field

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BondParams",
    "BealeWorkspace",
    "DepressionWave",
    "Grid",
    "KdvProfile",
    "K_eps",
    "NanopteronSolution",
    "PeriodicWave",
    "PhysicalWave",
    "ScalingParams",
    "SpectralField",
    "StabilityMap",
    "StabilitySample",
    "WeightedNorm",
    "beale_iterate",
    "classify",
    "delta_bf",
    "delta_mi",
    "direct_newton_step",
    "full_residual",
    "j0",
    "k_crit",
    "kdv_residual",
    "l_eps",
    "l_inv",
    "load_field",
    "m_beta",
    "m_beta_derivs",
    "make_workspace",
    "mechanisms",
    "nondimensionalize",
    "phase_speed_min",
    "profile_residual",
    "project",
    "remainder_scaling",
    "s0_apply",
    "s0_solve",
    "s_eps_solve",
    "sample_on_grid",
    "save_field",
    "sigma_beta",
    "sigma_hat",
    "solve_depression",
    "solve_periodic",
    "stability_map",
    "unscale",
    "__version__",
]
