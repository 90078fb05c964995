"""Small-amplitude periodic traveling waves of the rescaled profile equation.

The family is parameterized by an amplitude a and built as
W(X) = a * phi(K X) with phi(y) = sum_n c_n cos(n y), normalized by c_1 = 1
so that the a = 0 member is exactly (cos, K_eps).  Dividing the mode-n
equation

    l_eps(n K) * a * c_n + a^2 * (phi^2)_n = 0,        n = 0..M,

by a gives a bordered square system for (c_0..c_M, K) that is solved by
damped Newton with continuation from the a = 0 seed.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dispersion import K_eps, l_eps, m_beta_derivs
from .errors import AliasingTailError, NewtonDivergenceError, OffGridFrequencyError
from .spectral import SpectralField

#: default amplitude cap of the family (empirical; reported in metadata)
ALPHA_MAX = 0.05
#: relative size allowed for the last retained harmonic
ALIASING_RTOL = 1e-10
#: hard cap on automatic harmonic-doubling
MAX_HARMONICS = 256


@dataclass(frozen=True)
class PeriodicWave:
    """One member (a, K, c_0..c_M) of the periodic family."""

    params: object
    scaling: object
    a: float
    K: float
    cos_coeffs: np.ndarray

    @property
    def n_harmonics(self):
        return len(self.cos_coeffs) - 1

    def profile_values(self, arg):
        """phi(arg) = sum_n c_n cos(n * arg) evaluated pointwise."""
        n = np.arange(len(self.cos_coeffs))
        return np.cos(np.multiply.outer(arg, n)) @ self.cos_coeffs

    def to_dict(self):
        return {
            "beta": self.params.beta,
            "epsilon": self.scaling.epsilon,
            "a": self.a,
            "K": self.K,
            "cos_coeffs": list(self.cos_coeffs),
        }


def cos_square_coeffs(c):
    """Cosine coefficients of phi^2 up to mode 2M (exact convolution)."""
    m = len(c) - 1
    out = np.zeros(2 * m + 1)
    half = 0.5 * np.outer(c, c)
    idx = np.arange(m + 1)
    np.add.at(out, idx[:, None] + idx[None, :], half)
    np.add.at(out, np.abs(idx[:, None] - idx[None, :]), half)
    return out


def _divided_residual(params, scaling, c, big_k, a):
    """Residual of the a-divided mode equations plus the normalization row."""
    m = len(c) - 1
    n = np.arange(m + 1)
    lvals = l_eps(params, scaling, n * big_k)
    sq = cos_square_coeffs(c)[: m + 1]
    rows = lvals * c + a * sq
    return np.concatenate([rows, [c[1] - 1.0]])


def _divided_jacobian(params, scaling, c, big_k, a):
    m = len(c) - 1
    n = np.arange(m + 1)
    lvals = l_eps(params, scaling, n * big_k)
    jac = np.zeros((m + 2, m + 2))
    jac[: m + 1, : m + 1] = np.diag(lvals)
    # d(phi^2)_n / d(c_j) = sum_i c_i (delta_{i+j,n} + delta_{|i-j|,n});
    # |i-j| repeats indices, so accumulate with add.at
    for j in range(m + 1):
        rows_sum = n + j
        keep = rows_sum <= m
        np.add.at(jac, (rows_sum[keep], j), a * c[keep])
        np.add.at(jac, (np.abs(n - j), j), a * c)
    # d/dK of l_eps(nK) c_n: (n/eps) * m'(eps n K) * c_n
    eps = scaling.epsilon
    jac[: m + 1, m + 1] = n * m_beta_derivs(params, eps * n * big_k, 1) / eps * c
    jac[m + 1, 1] = 1.0
    return jac


def periodic_residual(wave):
    """Mode residuals of the full equation (divided by eps^2) plus c_1 - 1.

    Component n is l_eps(n K) * a * c_n + a^2 * (phi^2)_n; all components
    vanish at a = 0 regardless of K, which is why the solver works with the
    a-divided bordered system instead.
    """
    c = wave.cos_coeffs
    m = len(c) - 1
    n = np.arange(m + 1)
    lvals = l_eps(wave.params, wave.scaling, n * wave.K)
    sq = cos_square_coeffs(c)[: m + 1]
    rows = lvals * wave.a * c + wave.a**2 * sq
    return np.concatenate([rows, [c[1] - 1.0]])


def solve_periodic(
    params,
    scaling,
    a,
    n_harmonics=32,
    tol=1e-12,
    max_iter=50,
    alpha_max=ALPHA_MAX,
):
    """Member of the periodic family at amplitude a.

    Continuation from the exact a = 0 seed in ten equal amplitude steps,
    damped Newton at each step, automatic harmonic doubling if the last
    coefficient fails the aliasing guard.
    """
    if abs(a) > alpha_max:
        raise ValueError(f"|a| = {abs(a)} exceeds the amplitude cap {alpha_max}")
    k_seed = K_eps(params, scaling)

    m = n_harmonics
    while True:
        c = np.zeros(m + 1)
        c[1] = 1.0
        big_k = k_seed
        if a != 0.0:
            for a_step in a * np.arange(1, 11) / 10.0:
                c, big_k = _newton(params, scaling, c, big_k, a_step, tol, max_iter)
        tail = abs(c[-1]) if a != 0.0 else 0.0
        if tail <= ALIASING_RTOL * np.max(np.abs(c)):
            break
        if 2 * m > MAX_HARMONICS:
            raise AliasingTailError(
                f"harmonic tail {tail:.3e} persists at M = {m}; wave too nonlinear"
            )
        m *= 2
    return PeriodicWave(params=params, scaling=scaling, a=a, K=float(big_k), cos_coeffs=c)


def _newton(params, scaling, c, big_k, a, tol, max_iter):
    res = _divided_residual(params, scaling, c, big_k, a)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm <= tol:
            return c, big_k
        jac = _divided_jacobian(params, scaling, c, big_k, a)
        step = scipy.linalg.solve(jac, -res)
        lam = 1.0
        for _ in range(12):
            c_new = c + lam * step[:-1]
            k_new = big_k + lam * step[-1]
            res_new = _divided_residual(params, scaling, c_new, k_new, a)
            norm_new = np.max(np.abs(res_new))
            if norm_new < norm or norm <= tol:
                break
            lam *= 0.5
        else:
            raise NewtonDivergenceError("damping exhausted in periodic-wave solve")
        c, big_k, res, norm = c_new, k_new, res_new, norm_new
    if norm <= tol:
        return c, big_k
    raise NewtonDivergenceError(
        f"periodic-wave Newton stalled at residual {norm:.3e} (tol {tol:.0e})"
    )


def sample_on_grid(wave, grid, include_amplitude=True, require_on_grid=False):
    """Sample a*phi(K X) (or phi(K X)) on a line grid.

    With ``require_on_grid`` the frequency must sit on the grid's frequency
    lattice (K L / pi integral) so the sampled wave is exactly periodic.
    """
    ratio = wave.K * grid.half_length / np.pi
    if require_on_grid and abs(ratio - round(ratio)) > 1e-9:
        raise OffGridFrequencyError(
            f"K*L/pi = {ratio} is not integral; ripple is off the frequency lattice"
        )
    vals = wave.profile_values(wave.K * grid.x)
    if include_amplitude:
        vals = wave.a * vals
    return SpectralField(grid, vals, even=True)
