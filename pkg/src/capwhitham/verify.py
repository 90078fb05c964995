"""Acceptance suite: every scaling law and consistency check, one runner.

Each criterion is a named entry with a time budget and a callable that
returns (passed, details).  The heavy generalized-solitary-wave sweep is
computed once and shared.  ``run()`` executes a selection and reports one
pass/fail line per criterion; the CLI ``verify`` command and the pytest
acceptance module both drive this registry.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .depression import remainder_scaling, solve_depression
from .dispersion import BondParams, ScalingParams, K_eps, k_crit, m_beta
from .kdv import kdv_residual, j0, sigma_beta
from .modstab import delta_mi, stability_map
from .nanopteron import beale_iterate, direct_newton_step, make_workspace
from .periodic import solve_periodic
from .spectral import Grid, SpectralField

DEFAULT_SEED = 2024

#: (beta, epsilon) sweep behind the fixed-point convergence criteria
SWEEP_BETAS = (0.1, 0.2)
SWEEP_EPS = (0.25, 0.2, 0.15, 0.1)


def _loglog_slope(xs, ys):
    return float(np.polyfit(np.log(np.asarray(xs)), np.log(np.asarray(ys)), 1)[0])


def random_even_field(grid, rng, spectral_width=3.0, envelope_frac=5.0):
    """Smooth random even profile with a gaussian envelope (unit sup norm).

    Boundary values are below 1e-9 of the peak and the Nyquist mode is
    cleared, so the result is safe for off-grid coefficient quadrature and
    exact under multiplier application.
    """
    n = grid.n_points
    c = (rng.normal(size=n) + 1j * rng.normal(size=n)) * np.exp(-((grid.k / spectral_width) ** 2))
    v = grid.from_coeffs(c).real
    v = grid.symmetrize(v) * np.exp(-((grid.x / (grid.half_length / envelope_frac)) ** 2))
    c = grid.to_coeffs(v)
    c[n // 2] = 0.0
    v = grid.from_coeffs(c).real
    return SpectralField(grid, v / np.max(np.abs(v)))


def richardson_d1(f, x, h=1e-3):
    def central(hh):
        return (f(x + hh) - f(x - hh)) / (2.0 * hh)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


def richardson_d2(f, x, h=0.02):
    def central(hh):
        return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh)

    def level1(hh):
        return (4.0 * central(hh / 2.0) - central(hh)) / 3.0

    return (16.0 * level1(h / 2.0) - level1(h)) / 15.0


class VerifyContext:
    """Shared artifacts for the acceptance run (sweep results are cached)."""

    def __init__(self, seed=DEFAULT_SEED, sweep_betas=SWEEP_BETAS, sweep_eps=SWEEP_EPS):
        self.seed = seed
        self.sweep_betas = sweep_betas
        self.sweep_eps = sweep_eps
        self._sweep = None
        self._oracle_solution = None

    def sweep(self):
        if self._sweep is None:
            runs = {}
            for beta in self.sweep_betas:
                params = BondParams(beta)
                for eps in self.sweep_eps:
                    scaling = ScalingParams.from_epsilon(params, eps)
                    ws = make_workspace(params, scaling)
                    runs[(beta, eps)] = beale_iterate(ws)
            self._sweep = runs
        return self._sweep

    def oracle_solution(self):
        if self._oracle_solution is None:
            params = BondParams(0.2)
            scaling = ScalingParams.from_epsilon(params, 0.2)
            ws = make_workspace(params, scaling)
            self._oracle_solution = beale_iterate(ws)
        return self._oracle_solution


# -- criteria ---------------------------------------------------------------------


def crit_sigma_core(ctx):
    grid = Grid(80.0, 1024)
    residuals = {}
    for beta in (0.1, 0.5, 2.0):
        residuals[beta] = kdv_residual(sigma_beta(BondParams(beta), grid))
    worst = max(residuals.values())
    return worst <= 1e-10, {"max_residual": worst, "residuals": residuals}


def crit_j0_scaling(ctx):
    params = BondParams(0.1)
    grid = Grid(80.0, 1024)
    prof = sigma_beta(params, grid)
    eps_list = [0.4, 0.3, 0.2, 0.1, 0.05]
    norms = [j0(prof, ScalingParams.from_epsilon(params, e)).l2() for e in eps_list]
    slope = _loglog_slope(eps_list, norms)
    return abs(slope - 2.0) <= 0.2, {"slope": slope, "norms": dict(zip(eps_list, norms))}


def crit_symbol_quartic(ctx):
    params = BondParams(0.1)
    ks = np.geomspace(1e-3, 0.3, 200)
    eta = np.abs(m_beta(params, ks) - 1.0 + params.gamma * ks**2)
    slope = _loglog_slope(ks, eta)
    return abs(slope - 4.0) <= 0.1, {"slope": slope}


def crit_depression_remainder(ctx):
    eps_list = [0.3, 0.2, 0.15, 0.1]
    details = {}
    passed = True
    for beta in (0.5, 2.0):
        params = BondParams(beta)
        slope, norms = remainder_scaling(params, eps_list)
        scaling = ScalingParams.from_epsilon(params, 0.1)
        sol = solve_depression(params, scaling)
        details[beta] = {"slope": slope, "residual": sol.residual, "norms": norms}
        passed = passed and slope >= 3.5 and sol.residual <= 1e-11
    return passed, details


def crit_periodic_family(ctx):
    params = BondParams(0.2)
    scaling = ScalingParams.from_epsilon(params, 0.25)
    seed = solve_periodic(params, scaling, 0.0)
    k_exact = K_eps(params, scaling)
    seed_ok = (
        seed.K == k_exact
        and seed.cos_coeffs[1] == 1.0
        and float(np.max(np.abs(np.delete(seed.cos_coeffs, 1)))) == 0.0
    )

    amplitudes = [0.02, 0.01, 0.005, 0.0025]
    waves = {a: solve_periodic(params, scaling, a) for a in amplitudes}
    ratios = [
        abs(waves[a].K - waves[b].K) / (a - b)
        for a, b in zip(amplitudes[:-1], amplitudes[1:])
    ]
    stable = max(ratios) <= 3.0 * min(ratios) and max(ratios) < 100.0
    return seed_ok and stable, {
        "seed_exact": bool(seed_ok),
        "lipschitz_ratios": ratios,
    }


def _contractions(ctx):
    out = {}
    for (beta, eps), sol in ctx.sweep().items():
        steps = sol.steps
        ratios = [
            steps[i + 1] / steps[i]
            for i in range(len(steps) - 1)
            if steps[i] > 1e-12 and steps[i + 1] > 0.0
        ]
        out[(beta, eps)] = float(np.exp(np.mean(np.log(ratios)))) if ratios else float("nan")
    return out


def crit_beale_convergence(ctx):
    contr = _contractions(ctx)
    details = {}
    passed = True
    for beta in ctx.sweep_betas:
        series = [contr[(beta, eps)] for eps in ctx.sweep_eps]
        residuals = [ctx.sweep()[(beta, eps)].residual for eps in ctx.sweep_eps]
        dec = all(series[i + 1] < series[i] for i in range(len(series) - 1))
        below_one = all(r < 1.0 for r in series)
        res_ok = all(r <= 1e-10 for r in residuals)
        details[beta] = {
            "contractions": dict(zip(ctx.sweep_eps, series)),
            "residuals": dict(zip(ctx.sweep_eps, residuals)),
        }
        passed = passed and dec and below_one and res_ok
    return passed, details


def crit_remainder_ripple(ctx):
    details = {}
    passed = True
    for beta in ctx.sweep_betas:
        params = BondParams(beta)
        norms = [
            ctx.sweep()[(beta, eps)].R.weighted_norm(0, 0.1) for eps in ctx.sweep_eps
        ]
        slope = _loglog_slope(ctx.sweep_eps, norms)
        ratios = [abs(ctx.sweep()[(beta, eps)].a) / eps**4 for eps in ctx.sweep_eps]
        monotone = all(ratios[i + 1] < ratios[i] for i in range(len(ratios) - 1))
        freq_ok = True
        freq = {}
        for eps in ctx.sweep_eps:
            sol = ctx.sweep()[(beta, eps)]
            target = k_crit(params, sol.workspace.scaling.c)
            dev = abs(eps * sol.wave.K - target)
            freq[eps] = dev
            freq_ok = freq_ok and dev <= eps**2
        details[beta] = {
            "remainder_slope": slope,
            "unscaled_equivalent_slope": slope + 2.0,
            "a_over_eps4": dict(zip(ctx.sweep_eps, ratios)),
            "a_monotone_decreasing": bool(monotone),
            "ripple_freq_deviation": freq,
        }
        passed = passed and slope >= 1.8 and monotone and freq_ok
    return passed, details


def crit_oracle_newton(ctx):
    sol = ctx.oracle_solution()
    step = direct_newton_step(sol.workspace, sol)
    return step <= 1e-8, {"newton_step_sup": step}


def crit_uniqueness(ctx):
    sol = ctx.oracle_solution()
    ws = sol.workspace
    rng = np.random.default_rng(ctx.seed)
    r0 = 1e-3 * random_even_field(ws.grid, rng)
    again = beale_iterate(ws, r0=r0, a0=1e-3)
    d_r = float(np.max(np.abs(again.R.values - sol.R.values)))
    d_a = abs(again.a - sol.a)
    return d_r + d_a <= 1e-8, {"dR_sup": d_r, "da": d_a}


def crit_stability_diagram(ctx):
    curve_betas = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30]
    curve_vals = {}
    curve_ok = True
    for beta in curve_betas:
        params = BondParams(beta)
        val = delta_mi(params, k_crit(params, 1.0))
        curve_vals[beta] = val
        curve_ok = curve_ok and val > 0.0

    base = stability_map(resolution=(64, 64))
    counts = base.verdict_counts()
    both = counts["S"] > 0 and counts["U"] > 0

    fine = stability_map(resolution=(127, 127))
    stable_refine = True
    for i in range(64):
        for j in range(64):
            if abs(base.delta_mi[i, j]) > 1e-6:
                if base.verdicts[i, j] != fine.verdicts[2 * i, 2 * j]:
                    stable_refine = False
    return curve_ok and both and stable_refine, {
        "delta_mi_on_curve": curve_vals,
        "verdict_counts": counts,
        "refinement_stable": bool(stable_refine),
    }


def crit_delta_mi_crosscheck(ctx):
    rng = np.random.default_rng(ctx.seed)
    worst = 0.0
    n_checked = 0
    for _ in range(100):
        beta = float(rng.uniform(0.02, 0.32))
        k = float(rng.uniform(0.1, 10.0))
        params = BondParams(beta)

        def m_scalar(kk):
            return m_beta(params, kk)

        mk = m_scalar(k)
        m2k = m_scalar(2.0 * k)
        d1 = richardson_d1(m_scalar, k)
        d2 = richardson_d2(m_scalar, k)
        cg = mk + k * d1
        cgp = 2.0 * d1 + k * d2
        den = mk - m2k
        if abs(den) <= 1e-12:
            continue
        dbf = 2.0 * den + (cg - 1.0)
        fd_val = cgp * (cg - 1.0) / den * dbf
        an_val = delta_mi(params, k)
        rel = abs(an_val - fd_val) / max(abs(an_val), abs(fd_val), 1e-9)
        worst = max(worst, rel)
        n_checked += 1
    return worst <= 1e-6, {"worst_relative": worst, "n_checked": n_checked}


@dataclass(frozen=True)
class Criterion:
    name: str
    anchor: str
    budget_s: float
    fn: object
    summary: str


CRITERIA = [
    Criterion("sigma-core", "kdv-core-residual", 1.0, crit_sigma_core,
              "sampled sech^2 core solves the KdV profile ODE to 1e-10"),
    Criterion("j0-scaling", "forcing-eps2-scaling", 5.0, crit_j0_scaling,
              "forcing-term norm scales like eps^2 (slope 2.0 +- 0.2)"),
    Criterion("symbol-quartic", "symbol-quartic-remainder", 1.0, crit_symbol_quartic,
              "symbol minus long-wave parabola is quartic (slope 4.0 +- 0.1)"),
    Criterion("depression-remainder", "depression-eps4-remainder", 60.0,
              crit_depression_remainder,
              "depression-wave remainder fits slope >= 3.5 at residual <= 1e-11"),
    Criterion("periodic-family", "periodic-family-lipschitz", 30.0, crit_periodic_family,
              "a = 0 seed is exact; frequency is Lipschitz in amplitude"),
    Criterion("beale-convergence", "fixed-point-contraction", 600.0, crit_beale_convergence,
              "fixed-point contraction < 1, improving with eps; residual <= 1e-10"),
    Criterion("remainder-ripple", "remainder-ripple-asymptotics", 0.0, crit_remainder_ripple,
              "remainder slope >= 1.8; |a|/eps^4 decreasing; ripple frequency window"),
    Criterion("oracle-newton", "direct-newton-consistency", 120.0, crit_oracle_newton,
              "independent direct Newton moves the solution <= 1e-8"),
    Criterion("uniqueness", "fixed-point-uniqueness", 120.0, crit_uniqueness,
              "perturbed-seed iteration reconverges to the same pair <= 1e-8"),
    Criterion("stability-diagram", "modulational-diagram", 60.0, crit_stability_diagram,
              "index positive along the critical curve; S and U regions; refinement-stable"),
    Criterion("delta-mi-crosscheck", "index-derivative-crosscheck", 5.0,
              crit_delta_mi_crosscheck,
              "analytic index matches Richardson finite differences to 1e-6"),
]

@dataclass
class CriterionResult:
    name: str
    anchor: str
    summary: str
    passed: bool
    elapsed_s: float
    budget_s: float
    within_budget: bool
    details: dict = field(default_factory=dict)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def run(only=None, seed=DEFAULT_SEED, printer=print):
    """Execute the acceptance criteria; returns a list of CriterionResult.

    ``only`` restricts to a single criterion name (dependencies such as the
    shared sweep are still built on demand).
    """
    ctx = VerifyContext(seed=seed)
    selected = [c for c in CRITERIA if only in (None, "", c.name)]
    if not selected:
        raise ValueError(f"unknown criterion {only!r}; names: {[c.name for c in CRITERIA]}")

    results = []
    for crit in selected:
        start = time.perf_counter()
        passed, details = crit.fn(ctx)
        elapsed = time.perf_counter() - start
        budget = crit.budget_s
        within = elapsed <= budget if budget > 0.0 else True
        result = CriterionResult(
            name=crit.name,
            anchor=crit.anchor,
            summary=crit.summary,
            passed=bool(passed) and within,
            elapsed_s=elapsed,
            budget_s=budget,
            within_budget=within,
            details=_jsonable(details),
        )
        results.append(result)
        if printer is not None:
            mark = "PASS" if result.passed else "FAIL"
            printer(f"[{mark}] {crit.name:<22} {elapsed:7.2f}s  {crit.summary}")
    return results


def report_dict(results):
    return {
        "all_passed": all(r.passed for r in results),
        "criteria": [
            {
                "name": r.name,
                "anchor": r.anchor,
                "summary": r.summary,
                "passed": r.passed,
                "details": r.details,
            }
            for r in results
        ],
    }
