"""Scalar dispersion machinery.

Holds the Bond-number parameters, the phase-speed symbol and its analytic
derivatives, the rescaled long-wave symbol, and the critical-frequency
root finder for the weak-surface-tension regime.

Everything here is a pure function of its arguments; parameter objects are
frozen and safe to share across parallel sweeps.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import backend
from .errors import NoRootError, NonPositiveInputError, WrongRegimeError

ONE_THIRD = 1.0 / 3.0

#: default absolute tolerance on the symbol residual for root finds
DEFAULT_ROOT_TOL = 1e-13


@dataclass(frozen=True)
class BondParams:
    """Bond number beta > 0 and the derived curvature gamma = (1 - 3*beta)/6.

    beta < 1/3 is the weak (supercritical, generalized-solitary-wave) regime,
    beta > 1/3 the strong (subcritical, depression-wave) regime; the boundary
    value is rejected outright.
    """

    beta: float
    gamma: float = field(init=False)

    def __post_init__(self):
        if not self.beta > 0.0:
            raise NonPositiveInputError(f"Bond number must be positive, got {self.beta}")
        if self.beta == ONE_THIRD:
            raise WrongRegimeError("beta = 1/3 sits on the regime boundary")
        object.__setattr__(self, "gamma", (1.0 - 3.0 * self.beta) / 6.0)

    @property
    def weak(self):
        return self.beta < ONE_THIRD

    @property
    def strong(self):
        return self.beta > ONE_THIRD


@dataclass(frozen=True)
class ScalingParams:
    """Long-wave scaling: small parameter epsilon and wave speed c."""

    epsilon: float
    c: float

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise NonPositiveInputError(f"epsilon must be positive, got {self.epsilon}")

    @classmethod
    def from_epsilon(cls, params, epsilon):
        """Nearly-critical speed c = 1 + gamma*epsilon^2 for the given regime."""
        return cls(epsilon=epsilon, c=1.0 + params.gamma * epsilon * epsilon)


def nondimensionalize(g, d, tau):
    """Bond parameters from gravity g, depth d, surface tension tau."""
    if not (g > 0 and d > 0 and tau > 0):
        raise NonPositiveInputError("g, d, tau must all be positive")
    return BondParams(tau / (g * d * d))


def _dispatch(fn, k, *args):
    k_arr = np.asarray(k, dtype=np.float64)
    out = fn(*args, k_arr)
    return float(out) if k_arr.ndim == 0 else out


def m_beta(params, k):
    """Phase speed m(k) = sqrt((1 + beta*k^2) * tanh(k)/k); m(0) = 1."""
    return _dispatch(backend.m_beta, k, params.beta)


def m_beta_derivs(params, k, order):
    """Closed-form first or second derivative of the phase speed."""
    if order == 1:
        return _dispatch(backend.m_beta_d1, k, params.beta)
    if order == 2:
        return _dispatch(backend.m_beta_d2, k, params.beta)
    raise ValueError(f"order must be 1 or 2, got {order}")


def l_eps(params, scaling, big_k):
    """Rescaled symbol (m(eps*K) - 1 - gamma*eps^2)/eps^2; vanishes at +-K_eps."""
    return _dispatch(backend.l_eps, big_k, params.beta, params.gamma, scaling.epsilon)


def phase_speed_min(params):
    """Location and value of the interior minimum of m on (0, inf).

    Only meaningful for beta < 1/3 (for beta > 1/3 the symbol is increasing
    and the infimum sits at k = 0).  The search window is widened until the
    symbol is increasing at its right edge, so small Bond numbers whose
    minimum sits beyond k = 10 are still bracketed.
    """
    hi = 10.0
    while m_beta_derivs(params, hi, 1) < 0.0:
        hi *= 2.0
        if hi > 1e9:  # pragma: no cover - m' > 0 eventually for any beta > 0
            raise NoRootError("could not bracket the symbol minimum")
    res = minimize_scalar(
        lambda k: m_beta(params, k),
        bounds=(1e-12, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x), float(res.fun)


def k_crit(params, c, tol=DEFAULT_ROOT_TOL):
    """Unique wavenumber k > k_min on the increasing branch with m(k) = c.

    Requires the weak regime.  Raises NoRootError when c lies below the
    global minimum of the symbol.
    """
    if params.beta >= ONE_THIRD:
        raise WrongRegimeError("critical frequency exists only for beta < 1/3")
    k_min, m_min = phase_speed_min(params)
    if c < m_min:
        raise NoRootError(f"speed {c} is below the symbol minimum {m_min}")
    hi = max(2.0 * k_min, k_min + 1.0)
    while m_beta(params, hi) < c:
        hi *= 2.0
    k = brentq(lambda kk: m_beta(params, kk) - c, k_min, hi, xtol=1e-15, rtol=8.9e-16)
    # Newton polish: m is monotone with O(1) slope on this branch
    for _ in range(5):
        r = m_beta(params, k) - c
        if abs(r) <= tol:
            break
        k -= r / m_beta_derivs(params, k, 1)
    if abs(m_beta(params, k) - c) > tol:
        raise NoRootError(f"root polish stalled at residual {m_beta(params, k) - c:.3e}")
    return float(k)


def K_eps(params, scaling, tol=DEFAULT_ROOT_TOL):
    """Scaled critical frequency k_crit(beta, c)/epsilon; O(1/epsilon)."""
    return k_crit(params, scaling.c, tol=tol) / scaling.epsilon
