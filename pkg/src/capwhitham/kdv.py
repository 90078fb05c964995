"""Leading-order solitary core and its linearization.

The long-wave limit of the rescaled profile equation is the KdV profile
ODE W'' - W + W^2/gamma = 0, whose unique even localized solution is the
sech^2 core sampled here.  This module also builds the small forcing term
driving the remainder equation and solves the order-zero linearization
S0 = 1 - (2/gamma) * (1 - d^2)^{-1} (sigma * .) on even profiles.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg

from .errors import BoundaryNotDecayedError, SolverDivergenceError
from .spectral import SpectralField, solve_even_linear
from . import backend

#: relative boundary magnitude above which the core is considered truncated
CORE_BOUNDARY_TOL = 1e-13
#: grid size at and below which the order-zero solve assembles a dense matrix
DENSE_SOLVE_MAX_N = 4096


@dataclass(frozen=True)
class KdvProfile:
    """Sampled sech^2 core for a given Bond number."""

    params: object             # BondParams
    field: SpectralField

    @property
    def amplitude(self):
        return (1.0 - 3.0 * self.params.beta) / 4.0


def _sech(u):
    e = np.exp(-np.abs(u))
    return 2.0 * e / (1.0 + e * e)


def sigma_beta(params, grid):
    """Core profile ((1 - 3*beta)/4) * sech^2(x/2) sampled on the grid.

    Positive for weak surface tension, negative for strong.  Raises when
    the domain is too short for the tails to vanish at the boundary
    (L >= 60 is comfortably enough).
    """
    if _sech(grid.half_length / 2.0) ** 2 > CORE_BOUNDARY_TOL:
        raise BoundaryNotDecayedError(
            f"sech^2(L/2) = {_sech(grid.half_length / 2.0) ** 2:.3e} at L = {grid.half_length}"
        )
    amp = (1.0 - 3.0 * params.beta) / 4.0
    vals = amp * _sech(grid.x / 2.0) ** 2
    return KdvProfile(params=params, field=SpectralField(grid, vals, even=True))


def sigma_hat(params, k):
    """Closed-form transform of the core: (1 - 3*beta) * k / (2*sinh(pi*k)).

    Uses the (1/2pi) * integral convention of ``SpectralField.coeff_at``;
    the k -> 0 limit is (1 - 3*beta)/(2*pi).  Stable for large k, where the
    value underflows smoothly to zero.
    """
    k_arr = np.atleast_1d(np.asarray(k, dtype=np.float64))
    t = np.pi * np.abs(k_arr)
    amp = 1.0 - 3.0 * params.beta
    small = t < 1e-8
    mid = (t >= 1e-8) & (t < 30.0)
    out = np.empty_like(k_arr)
    out[small] = amp / (2.0 * np.pi)
    tk = k_arr[mid]
    out[mid] = amp * tk / (2.0 * np.sinh(np.pi * tk))
    big = ~(small | mid)
    tb = np.abs(k_arr[big])
    # k/(2 sinh(pi k)) = k exp(-pi k) / (1 - exp(-2 pi k))
    out[big] = amp * tb * np.exp(-np.pi * tb) / (1.0 - np.exp(-2.0 * np.pi * tb))
    return float(out[0]) if np.ndim(k) == 0 else out


def kdv_residual(profile):
    """Sup norm of W'' - W + W^2/gamma for the sampled core (spectral W'')."""
    f = profile.field
    wxx = f.apply_multiplier(lambda k: -(k**2))
    res = wxx.values - f.values + f.values**2 / profile.params.gamma
    return float(np.max(np.abs(res)))


def j0_symbol(params, scaling, k):
    """Multiplier -(m(eps*k) - 1 + gamma*eps^2*k^2)/eps^2 of the forcing term."""
    eps = scaling.epsilon
    mk = backend.m_beta(params.beta, eps * np.asarray(k, dtype=np.float64))
    return -(mk - 1.0 + params.gamma * eps * eps * np.asarray(k) ** 2) / (eps * eps)


def j0(profile, scaling):
    """Small forcing term: the quartic symbol remainder applied to the core.

    Built as symbol(k) * sigma_hat(k) from the closed-form core transform:
    the symbol grows like gamma*k^2, so applying it to the sampled core
    would amplify the FFT noise floor of the exponentially dead tail into
    every value.  Its weighted norms shrink like eps^2.
    """
    params = profile.params
    grid = profile.field.grid
    coeffs = j0_symbol(params, scaling, grid.k) * sigma_hat(params, grid.k) + 0j
    coeffs[grid.n_points // 2] = 0.0
    return SpectralField.from_coeffs(grid, coeffs, even=True)


def _inv_helmholtz_coeffs(grid):
    return 1.0 / (1.0 + grid.k**2)


def s0_apply(profile, f):
    """Forward order-zero linearization: f - (1/gamma)(1 - d^2)^{-1}(2*sigma*f)."""
    grid = f.grid
    prod = profile.field * f
    smooth = prod.apply_multiplier(_inv_helmholtz_coeffs(grid))
    return f - (2.0 / profile.params.gamma) * smooth


def s0_solve(profile, rhs, tol=1e-12, max_iter=500):
    """Solve S0 R = rhs on even profiles.

    Dense LU for N <= 4096 (predictable), matrix-free LGMRES above.  The
    returned profile satisfies the equation to 1e-11 relative.
    """
    grid = rhs.grid
    n = grid.n_points
    sigma_vals = profile.field.values
    gamma = profile.params.gamma
    inv_h = _inv_helmholtz_coeffs(grid)

    # the full-grid operator is singular along the odd translational mode
    # sigma'; both solve paths therefore work on the even subspace
    def matvec(v):
        smooth = np.fft.ifft(inv_h * np.fft.fft(sigma_vals * v)).real
        return grid.symmetrize(v - (2.0 / gamma) * smooth)

    if n <= DENSE_SOLVE_MAX_N:
        sol = solve_even_linear(grid, matvec, rhs.values)
    else:
        op = scipy.sparse.linalg.LinearOperator(
            (n, n), matvec=lambda v: matvec(grid.symmetrize(v)), dtype=np.float64
        )
        sol, info = scipy.sparse.linalg.lgmres(
            op, rhs.values, rtol=tol, atol=0.0, maxiter=max_iter
        )
        if info != 0:
            raise SolverDivergenceError(
                "order-zero linearization solve did not converge", iterations=info
            )

    out = SpectralField(grid, sol, even=rhs.even)
    resid = s0_apply(profile, out) - rhs
    rhs_norm = rhs.l2()
    if rhs_norm > 0.0 and resid.l2() > 1e-11 * rhs_norm:
        raise SolverDivergenceError(
            f"order-zero solve residual {resid.l2() / rhs_norm:.3e} above 1e-11"
        )
    return out
