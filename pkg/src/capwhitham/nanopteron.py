"""Generalized solitary waves for weak surface tension.

The profile equation linearized about the sech^2 core is singular at the
resonant frequency K_eps, so the remainder equation is closed with a free
ripple amplitude: the ansatz W = sigma + a*Phi^a + R couples a localized
remainder R (with vanishing resonant mode) to a member of the periodic
family.  The solve projects the forcing off the resonant mode, inverts the
symbol on the complement, desingularizes the remaining operator, and
iterates the resulting pair of fixed-point maps from (0, 0).

The grid is built so that K_eps is exactly a lattice frequency; projection
and kernel-aware inversion are then exact diagonal operations.
"""

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.sparse.linalg

from .dispersion import K_eps, l_eps
from .errors import (
    GridTooCoarseError,
    KernelResidueError,
    MaxIterationsError,
    NoContractionError,
    SolverDivergenceError,
)
from .kdv import j0, sigma_beta, sigma_hat
from .periodic import sample_on_grid, solve_periodic
from .spectral import Grid, SpectralField, solve_even_linear

#: dense fallback threshold for the desingularized solve
DENSE_FALLBACK_MAX_N = 4096
#: minimum grid size regardless of ripple wavelength
MIN_GRID_POINTS = 1024


@dataclass(frozen=True)
class BealeWorkspace:
    """Precomputed grid-resonance data shared by one nanopteron solve."""

    params: object
    scaling: object
    grid: Grid
    j0_index: int
    K: float
    sigma: object              # KdvProfile
    phi0: SpectralField
    chi: float
    l_values: np.ndarray       # rescaled symbol on the grid, zeroed at +-j0
    proj_coeffs: np.ndarray    # coefficients of sigma * phi0
    forcing: SpectralField     # quartic-remainder forcing applied to sigma

    @property
    def sigma_field(self):
        return self.sigma.field


@dataclass
class NanopteronSolution:
    """Converged remainder/ripple pair with iteration metadata."""

    workspace: BealeWorkspace
    R: SpectralField
    a: float
    wave: object               # PeriodicWave at amplitude a
    iterations: int
    history: list              # per-iteration (||R_n - R_{n-1}||, |a_n - a_{n-1}|)
    residual: float

    @property
    def steps(self):
        return [dr + da for dr, da in self.history]


def make_workspace(params, scaling, target_l=100.0, target_n=None,
                   points_per_wavelength=8):
    """Grid with the resonant frequency snapped onto the lattice.

    The half length is adjusted to L = j0*pi/K_eps with
    j0 = round(K_eps*target_l/pi); the grid size defaults to the smallest
    power of two giving at least ``points_per_wavelength`` points per ripple
    wavelength.
    """
    k_res = K_eps(params, scaling)
    j0i = int(round(k_res * target_l / math.pi))
    if j0i < 1:
        raise GridTooCoarseError("domain too short to hold one ripple wavelength")
    half_l = j0i * math.pi / k_res

    if target_n is None:
        n = MIN_GRID_POINTS
        while n < points_per_wavelength * j0i:
            n *= 2
    else:
        n = int(target_n)
    if j0i >= n // 4:
        raise GridTooCoarseError(
            f"resonant mode {j0i} of N = {n} leaves under 4 points per wavelength"
        )

    grid = Grid(half_length=half_l, n_points=n)
    k_grid = float(grid.k[j0i])
    sigma = sigma_beta(params, grid)
    phi0 = SpectralField(grid, np.cos(k_grid * grid.x), even=True)

    l_res = l_eps(params, scaling, k_grid)
    if abs(l_res) > 1e-10:
        raise GridTooCoarseError(f"snapped frequency misses the kernel: l = {l_res:.3e}")
    l_values = l_eps(params, scaling, grid.k)
    l_values[j0i] = 0.0
    l_values[n - j0i] = 0.0
    l_values.flags.writeable = False

    proj_coeffs = grid.to_coeffs((sigma.field * phi0).values)
    proj_coeffs.flags.writeable = False
    chi = 2.0 * float(proj_coeffs[j0i].real)
    chi_closed = sigma_hat(params, 0.0) + sigma_hat(params, 2.0 * k_grid)
    if not chi >= 0.9 * sigma_hat(params, 0.0):
        raise GridTooCoarseError(f"resonant-mode overlap chi = {chi:.3e} degenerate")
    if abs(chi - chi_closed) > 1e-12:
        raise GridTooCoarseError(
            f"discrete chi deviates from closed form by {abs(chi - chi_closed):.3e}"
        )

    return BealeWorkspace(
        params=params,
        scaling=scaling,
        grid=grid,
        j0_index=j0i,
        K=k_grid,
        sigma=sigma,
        phi0=phi0,
        chi=chi,
        l_values=l_values,
        proj_coeffs=proj_coeffs,
        forcing=j0(sigma, scaling),
    )


# -- coefficient-space pipeline ---------------------------------------------------


def _project_coeffs(ws, coeffs):
    """Remove the resonant mode; returns (projected coeffs, extracted value)."""
    g_res = float(coeffs[ws.j0_index].real)
    return coeffs - (2.0 * g_res / ws.chi) * ws.proj_coeffs, g_res


def _l_inv_coeffs(ws, coeffs):
    out = np.zeros_like(coeffs)
    mask = ws.l_values != 0.0
    out[mask] = coeffs[mask] / ws.l_values[mask]
    out[ws.grid.n_points // 2] = 0.0
    return out


def project(ws, field):
    """P F = F - 2*Fhat(K_eps)*chi^{-1} * sigma * phi0; kills the resonant mode."""
    coeffs, _ = _project_coeffs(ws, field.coeffs)
    return SpectralField.from_coeffs(ws.grid, coeffs, even=field.even)


def l_inv(ws, field, residue_rtol=1e-9):
    """Inverse symbol on the kernel complement (resonant modes set to zero).

    The input must already have a negligible resonant-mode coefficient,
    i.e. be projected; otherwise the division would amplify the residue.
    """
    norm = field.l2()
    res = abs(float(field.coeffs[ws.j0_index].real))
    dk = math.pi / ws.grid.half_length
    # coefficient-scale equivalent of ||F||: ||F||_2 = sqrt(2 pi dk sum|c|^2)
    if norm > 0.0 and res * math.sqrt(2.0 * math.pi * dk) > residue_rtol * norm:
        raise KernelResidueError(
            f"resonant-mode content {res:.3e} too large; project the field first"
        )
    return SpectralField.from_coeffs(ws.grid, _l_inv_coeffs(ws, field.coeffs), even=field.even)


def _s_eps_matvec(ws, v):
    # symmetrized: the solve lives on even profiles, where the linearization
    # is invertible (its odd translational direction is excluded)
    v = ws.grid.symmetrize(v)
    w = 2.0 * ws.sigma_field.values * v
    coeffs = ws.grid.to_coeffs(w)
    coeffs, _ = _project_coeffs(ws, coeffs)
    u = ws.grid.from_coeffs(_l_inv_coeffs(ws, coeffs)).real
    return ws.grid.symmetrize(v + u)


def s_eps_solve(ws, rhs, tol=1e-11, maxiter=400):
    """Solve (I + Linv P (2 sigma .)) R = rhs, matrix-free Krylov.

    Falls back to a dense even-subspace solve for small grids if the
    Krylov solve stalls.
    """
    n = ws.grid.n_points
    b = rhs.values

    op = scipy.sparse.linalg.LinearOperator(
        (n, n), matvec=lambda v: _s_eps_matvec(ws, v), dtype=np.float64
    )
    sol, info = scipy.sparse.linalg.lgmres(op, b, rtol=0.1 * tol, atol=0.0, maxiter=maxiter)
    bnorm = float(np.linalg.norm(b))
    resid = float(np.linalg.norm(_s_eps_matvec(ws, sol) - b))
    if bnorm > 0.0 and resid > tol * bnorm:
        if n <= DENSE_FALLBACK_MAX_N:
            sol = solve_even_linear(ws.grid, lambda v: _s_eps_matvec(ws, v), b)
            resid = float(np.linalg.norm(_s_eps_matvec(ws, sol) - b))
        if bnorm > 0.0 and resid > tol * bnorm:
            raise SolverDivergenceError(
                f"desingularized solve residual {resid / bnorm:.3e} above {tol:.0e}",
                iterations=info,
            )
    return SpectralField(ws.grid, sol, even=rhs.even)


def assemble_rhs(ws, remainder, a, phi_a=None):
    """Forcing G = J0 - R^2 - 2a*sigma*(Phi^a - Phi^0) - 2a*Phi^a*R.

    ``phi_a`` is the unit-amplitude ripple profile sampled on the grid;
    omit it (or pass None) for a = 0, where only J0 - R^2 survives.
    """
    g = ws.forcing - remainder * remainder
    if a != 0.0 and phi_a is not None:
        g = g - (2.0 * a) * (ws.sigma_field * (phi_a - ws.phi0))
        g = g - (2.0 * a) * (phi_a * remainder)
    elif a != 0.0:
        g = g - (2.0 * a) * (ws.phi0 * remainder)
    return g


def beale_iterate(
    ws,
    tol=1e-12,
    max_iter=100,
    r0=None,
    a0=0.0,
    n_harmonics=32,
    wave_refresh_rtol=0.1,
    stall_limit=5,
):
    """Fixed-point iteration for the remainder/ripple pair from (R, a) = (0, 0).

    Each sweep applies the linear solve to the assembled forcing and updates
    the ripple amplitude from the resonant-mode balance; the periodic wave
    is re-solved only when the amplitude moves by more than
    ``wave_refresh_rtol`` relative, since the family is Lipschitz in a.
    """
    remainder = r0 if r0 is not None else SpectralField.zeros(ws.grid)
    a = float(a0)
    wave = None
    phi_a = None
    history = []
    prev_step = math.inf
    stalls = 0

    for iteration in range(1, max_iter + 1):
        if a != 0.0 and (wave is None or abs(a - wave.a) > wave_refresh_rtol * abs(a)):
            wave = solve_periodic(ws.params, ws.scaling, a, n_harmonics=n_harmonics)
            phi_a = sample_on_grid(wave, ws.grid, include_amplitude=False)

        g = assemble_rhs(ws, remainder, a, phi_a)
        g_coeffs, g_res = _project_coeffs(ws, g.coeffs)
        rhs = SpectralField.from_coeffs(ws.grid, _l_inv_coeffs(ws, g_coeffs), even=True)
        r_new = s_eps_solve(ws, rhs)
        sr_res = float((ws.sigma_field * r_new).coeffs[ws.j0_index].real)
        a_new = (g_res - 2.0 * sr_res) / ws.chi

        d_r = (r_new - remainder).l2()
        d_a = abs(a_new - a)
        history.append((d_r, d_a))
        step = d_r + d_a
        remainder, a = r_new, a_new
        if step <= tol:
            break
        if step > prev_step:
            stalls += 1
            if stalls >= stall_limit:
                raise NoContractionError(
                    f"steps grew {stall_limit} times in a row (last {step:.3e}); "
                    "epsilon is likely too large for contraction"
                )
        else:
            stalls = 0
        prev_step = step
    else:
        raise MaxIterationsError(f"no convergence to {tol:.0e} in {max_iter} sweeps")

    wave = solve_periodic(ws.params, ws.scaling, a, n_harmonics=n_harmonics)
    residual = full_residual(ws, remainder, a, wave)
    return NanopteronSolution(
        workspace=ws,
        R=remainder,
        a=a,
        wave=wave,
        iterations=iteration,
        history=history,
        residual=residual,
    )


# -- independent residual evaluation ----------------------------------------------


def _fresh_l_symbol(ws):
    # same rescaled symbol, but rebuilt from the dispersion side with no
    # forced kernel zeros: the evaluator must not reuse the solve machinery
    return l_eps(ws.params, ws.scaling, ws.grid.k)


def _ripple_linear_values(ws, a, wave):
    """a * (L_eps Phi^a)(x) summed mode by mode (the ripple is off-lattice)."""
    if a == 0.0 or wave is None:
        return np.zeros(ws.grid.n_points)
    n = np.arange(len(wave.cos_coeffs))
    lvals = l_eps(ws.params, ws.scaling, n * wave.K)
    modes = np.cos(np.multiply.outer(ws.grid.x, n * wave.K))
    return a * (modes @ (lvals * wave.cos_coeffs))


def full_residual(ws, remainder, a, wave):
    """Relative sup-norm residual of the rescaled profile equation.

    Evaluates the multiplier on the localized part by FFT, the ripple part
    by an exact cosine-mode sum (its frequency is off the lattice), and the
    quadratic term pointwise, so nothing from the projection/inversion
    pipeline is reused.
    """
    localized = ws.sigma_field + remainder
    lin_loc = localized.apply_multiplier(_fresh_l_symbol(ws))
    phi_vals = 0.0
    if a != 0.0 and wave is not None:
        phi_vals = wave.profile_values(wave.K * ws.grid.x)
    w_vals = localized.values + a * phi_vals
    total = lin_loc.values + _ripple_linear_values(ws, a, wave) + w_vals**2
    scale = float(np.max(np.abs(w_vals)))
    return float(np.max(np.abs(total))) / scale if scale > 0.0 else 0.0


def profile_residual(params, scaling, field, scaled=True):
    """Residual of a plain decaying profile (no ripple component).

    With ``scaled`` the rescaled equation divided by eps^2 is used; else the
    unscaled traveling-wave equation (M - c) w + w^2 = 0.
    """
    if scaled:
        lin = field.apply_multiplier(lambda k: l_eps(params, scaling, k))
    else:
        from .dispersion import m_beta as _m

        lin = field.apply_multiplier(lambda k: _m(params, k) - scaling.c)
    total = lin.values + field.values**2
    scale = field.sup()
    return float(np.max(np.abs(total))) / scale if scale > 0.0 else 0.0


# -- physical-variable assembly ----------------------------------------------------


@dataclass(frozen=True)
class PhysicalWave:
    """Unscaled traveling wave w(x) = eps^2 W(eps x) with its decomposition."""

    x: np.ndarray
    w: np.ndarray
    core: np.ndarray           # eps^2 (sigma + R)(eps x), exponentially localized
    ripple: np.ndarray         # eps^2 a Phi^a(eps x), non-decaying end state
    speed: float
    ripple_frequency: float    # per unit x; approximately k_crit(beta, c)
    ripple_amplitude: float


def unscale(sol):
    """Physical-variable profile and components of a converged solution."""
    ws = sol.workspace
    eps = ws.scaling.epsilon
    eps2 = eps * eps
    phi_vals = sol.wave.profile_values(sol.wave.K * ws.grid.x)
    core = eps2 * (ws.sigma_field.values + sol.R.values)
    ripple = eps2 * sol.a * phi_vals
    return PhysicalWave(
        x=ws.grid.x / eps,
        w=core + ripple,
        core=core,
        ripple=ripple,
        speed=ws.scaling.c,
        ripple_frequency=eps * sol.wave.K,
        ripple_amplitude=abs(eps2 * sol.a) * float(np.max(np.abs(phi_vals))),
    )


# -- independent Newton oracle -----------------------------------------------------


def _direct_residual_values(ws, r_values, a, wave):
    loc = SpectralField(ws.grid, ws.sigma_field.values + r_values, even=True)
    lin_loc = loc.apply_multiplier(_fresh_l_symbol(ws))
    phi_vals = wave.profile_values(wave.K * ws.grid.x) if wave is not None else 0.0
    w_vals = loc.values + a * phi_vals
    return lin_loc.values + _ripple_linear_values(ws, a, wave) + w_vals**2, w_vals


def direct_newton_step(ws, sol, fd_delta=1e-6, gmres_tol=1e-8, maxiter=600):
    """One Newton step of the direct grid discretization, started at ``sol``.

    Unknowns are all remainder samples plus the ripple amplitude; equations
    are the profile-equation residual at every grid point plus the
    resonant-mode constraint on the remainder.  Built entirely from the
    multiplier and the periodic family (finite differences in a), so it is
    independent of the projection/inversion pipeline.  Returns the sup-norm
    size of the step, which is small iff ``sol`` solves the direct system.
    """
    grid = ws.grid
    n = grid.n_points
    r_vals = sol.R.values
    a = sol.a

    e_vals, w_vals = _direct_residual_values(ws, r_vals, a, sol.wave)
    cos_row = np.cos(ws.K * grid.x) * (grid.spacing / (2.0 * math.pi))
    g_constraint = float(np.dot(cos_row, r_vals))

    delta = max(fd_delta, abs(a))
    wave_p = solve_periodic(ws.params, ws.scaling, a + delta)
    wave_m = solve_periodic(ws.params, ws.scaling, a - delta)
    e_p, _ = _direct_residual_values(ws, r_vals, a + delta, wave_p)
    e_m, _ = _direct_residual_values(ws, r_vals, a - delta, wave_m)
    b_col = (e_p - e_m) / (2.0 * delta)

    l_sym = _fresh_l_symbol(ws)

    def jac_matvec(v):
        # even subspace: the odd translational direction is not an unknown
        dr, da = grid.symmetrize(v[:n]), v[n]
        lin = grid.from_coeffs(l_sym * grid.to_coeffs(dr)).real
        top = grid.symmetrize(lin + 2.0 * w_vals * dr + da * b_col)
        bottom = float(np.dot(cos_row, dr))
        out = np.empty(n + 1)
        out[:n] = top
        out[n] = bottom
        return out

    # left preconditioner: divide coefficients by the symbol clipped away
    # from its kernel; the remaining low-rank coupling is left to Krylov
    floor = abs(ws.params.gamma)
    l_clip = np.where(np.abs(l_sym) < floor, np.sign(l_sym + (l_sym == 0.0)) * floor, l_sym)

    def precond(v):
        out = np.empty(n + 1)
        out[:n] = grid.from_coeffs(grid.to_coeffs(v[:n]) / l_clip).real
        out[n] = v[n]
        return out

    op = scipy.sparse.linalg.LinearOperator(
        (n + 1, n + 1), matvec=jac_matvec, dtype=np.float64
    )
    pre = scipy.sparse.linalg.LinearOperator(
        (n + 1, n + 1), matvec=precond, dtype=np.float64
    )
    rhs = np.concatenate([-e_vals, [-g_constraint]])
    step, info = scipy.sparse.linalg.lgmres(
        op, rhs, M=pre, rtol=gmres_tol, atol=0.0, maxiter=maxiter
    )
    resid = float(np.linalg.norm(jac_matvec(step) - rhs))
    rnorm = float(np.linalg.norm(rhs))
    if rnorm > 0.0 and resid > 1e-6 * rnorm + 1e-14:
        raise SolverDivergenceError(
            f"bordered Newton solve stalled (relative residual {resid / rnorm:.3e})",
            iterations=info,
        )
    return max(float(np.max(np.abs(step[:n]))), abs(float(step[n])))
