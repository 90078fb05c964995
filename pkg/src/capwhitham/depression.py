"""Subcritical solitary waves of depression for strong surface tension.

For beta > 1/3 the shifted symbol m(k) - c stays positive at subcritical
speeds, so the traveling-wave equation (M - c) w + w^2 = 0 is solved by
direct Newton iteration from the sech^2 leading-order guess; the Jacobian
(M - c) + 2w is inverted matrix-free with the coercive multiplier as
preconditioner.  Solves run on the physical-variable grid with L = 40/eps
so the scaled support is fixed across epsilon.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg

from .dispersion import m_beta
from .errors import (
    NewtonDivergenceError,
    SolverDivergenceError,
    SymbolNotCoerciveError,
    WrongRegimeError,
)
from .spectral import Grid, SpectralField

#: scaled half length eps * L of the default solve domain
SCALED_HALF_LENGTH = 40.0
DEFAULT_GRID_POINTS = 1024


@dataclass(frozen=True)
class DepressionWave:
    """Converged depression wave with its leading-order part split off."""

    params: object
    scaling: object
    w: SpectralField
    leading: SpectralField
    residual: float            # sup |(M - c) w + w^2| / sup |w|
    newton_iterations: int

    @property
    def remainder_values(self):
        """R(eps x) = w - leading on the grid (scaled-variable remainder)."""
        return self.w.values - self.leading.values

    def remainder_norm(self, derivative_order=0):
        """L^2 norm of the remainder (or its scaled derivative) in X = eps*x."""
        eps = self.scaling.epsilon
        grid = self.w.grid
        vals = self.remainder_values
        for _ in range(derivative_order):
            # d/dX = (1/eps) d/dx, applied spectrally
            vals = grid.from_coeffs(1j * grid.k / eps * grid.to_coeffs(vals)).real
        return float(math.sqrt(eps * grid.spacing * np.dot(vals, vals)))


def default_grid(epsilon, n_points=DEFAULT_GRID_POINTS):
    """Physical-variable grid with eps * L = 40."""
    return Grid(half_length=SCALED_HALF_LENGTH / epsilon, n_points=n_points)


def solve_depression(params, scaling, grid=None, tol=1e-11, max_iter=40,
                     linear_tol=1e-12, linear_maxiter=300):
    """Newton solve of the unscaled profile equation in the strong regime.

    The initial guess is the leading-order term
    -((3*beta - 1)/4) * eps^2 * sech^2(eps*x/2); the converged profile
    satisfies the equation to ``tol`` relative in sup norm.
    """
    if not params.strong:
        raise WrongRegimeError("depression waves require beta > 1/3")
    eps = scaling.epsilon
    if grid is None:
        grid = default_grid(eps)
    if eps * grid.half_length < SCALED_HALF_LENGTH - 1e-9:
        raise ValueError(f"grid too short: eps*L = {eps * grid.half_length:.1f} < 40")

    shifted = m_beta(params, grid.k) - scaling.c
    margin = float(np.min(shifted))
    if margin <= 0.0:
        raise SymbolNotCoerciveError(
            f"min_k (m - c) = {margin:.3e} <= 0; wrong regime or epsilon too large"
        )

    e = np.exp(-np.abs(eps * grid.x / 2.0))
    sech = 2.0 * e / (1.0 + e * e)
    leading_vals = -((3.0 * params.beta - 1.0) / 4.0) * eps * eps * sech**2
    leading = SpectralField(grid, leading_vals, even=True)

    w = leading
    iterations = 0
    for iterations in range(1, max_iter + 1):
        f_vals = w.apply_multiplier(shifted).values + w.values**2
        scale = w.sup()
        if float(np.max(np.abs(f_vals))) <= tol * scale:
            break
        step = _newton_step(grid, shifted, w.values, f_vals, linear_tol, linear_maxiter)
        w = SpectralField(grid, w.values + step, even=True)
    else:
        raise NewtonDivergenceError(
            f"depression Newton did not reach {tol:.0e} in {max_iter} iterations"
        )

    f_vals = w.apply_multiplier(shifted).values + w.values**2
    residual = float(np.max(np.abs(f_vals))) / w.sup()
    return DepressionWave(
        params=params,
        scaling=scaling,
        w=w,
        leading=leading,
        residual=residual,
        newton_iterations=iterations,
    )


def _newton_step(grid, shifted, w_vals, f_vals, tol, maxiter):
    n = grid.n_points

    def matvec(v):
        # even subspace: the Jacobian kernel direction w' is odd
        v = grid.symmetrize(v)
        lin = grid.from_coeffs(shifted * grid.to_coeffs(v)).real
        return grid.symmetrize(lin + 2.0 * w_vals * v)

    def precond(v):
        return grid.from_coeffs(grid.to_coeffs(v) / shifted).real

    op = scipy.sparse.linalg.LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    pre = scipy.sparse.linalg.LinearOperator((n, n), matvec=precond, dtype=np.float64)
    step, info = scipy.sparse.linalg.lgmres(
        op, -f_vals, M=pre, rtol=tol, atol=0.0, maxiter=maxiter
    )
    resid = float(np.linalg.norm(matvec(step) + f_vals))
    fnorm = float(np.linalg.norm(f_vals))
    if fnorm > 0.0 and resid > 1e-8 * fnorm:
        raise SolverDivergenceError(
            f"Jacobian solve stalled at relative residual {resid / fnorm:.3e}",
            iterations=info,
        )
    return step


def remainder_scaling(params, eps_list, derivative_order=0, n_points=DEFAULT_GRID_POINTS):
    """Fitted log-log exponent of the remainder norm against epsilon.

    Solves at each epsilon on the default grid policy and fits
    log ||R_eps|| ~ slope * log eps; the quartic estimate predicts a slope
    of four.  Returns (slope, norms).
    """
    if len(eps_list) < 4:
        raise ValueError("need at least four epsilon values for a stable fit")
    eps_arr = np.asarray(sorted(eps_list, reverse=True), dtype=float)
    norms = []
    for eps in eps_arr:
        scaling = _scaling(params, eps)
        sol = solve_depression(params, scaling, grid=default_grid(eps, n_points))
        norms.append(sol.remainder_norm(derivative_order))
    slope = float(np.polyfit(np.log(eps_arr), np.log(norms), 1)[0])
    return slope, dict(zip(eps_arr.tolist(), norms))


def _scaling(params, eps):
    from .dispersion import ScalingParams

    return ScalingParams.from_epsilon(params, eps)
