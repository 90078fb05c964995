"""Modulational stability indices of the small-amplitude periodic waves.

The sign of the index

    Delta_MI(k) = (k m)'' ((k m)' - m(0)) / (m(k) - m(2k)) * Delta_BF(k),
    Delta_BF(k) = 2 (m(k) - m(2k)) + ((k m)' - m(0)),

classifies the periodic wave of frequency k as modulationally stable
(positive) or unstable (negative).  Sign changes can only come from four
mechanisms: an extremum of the group velocity, a long/short-wave
resonance (k m)' = m(0), a second-harmonic phase-speed resonance
m(k) = m(2k), or a zero of the Benjamin-Feir index.
"""

import concurrent.futures
import os
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import backend
from .dispersion import k_crit, phase_speed_min
from .errors import ResonantDenominatorError

#: |Delta_MI| below this is reported indeterminate rather than classified
INDETERMINATE_TOL = 1e-9
#: |m(k) - m(2k)| below this makes the index a 0/0 form
DENOMINATOR_TOL = 1e-12

MECHANISM_NAMES = {
    1: "group-velocity extremum",
    2: "long/short-wave resonance",
    3: "second-harmonic resonance",
    4: "benjamin-feir zero",
}


@dataclass(frozen=True)
class StabilitySample:
    """Index values and verdict at one (beta, k) point."""

    beta: float
    k: float
    delta_bf: float
    delta_mi: float
    verdict: str  # "S" | "U" | "I"


def delta_bf(params, k):
    """Benjamin-Feir index; vanishes at k = 0."""
    out = backend.delta_bf(params.beta, np.asarray(k, dtype=np.float64))
    return float(out) if np.ndim(k) == 0 else out


def delta_mi(params, k):
    """Modulational index; raises on a second-harmonic resonance."""
    num, den, dbf = backend.delta_mi_parts(params.beta, np.asarray(k, dtype=np.float64))
    if np.any(np.abs(den) <= DENOMINATOR_TOL):
        raise ResonantDenominatorError(
            "m(k) = m(2k) within tolerance; the index is singular here"
        )
    out = num / den * dbf
    return float(out) if np.ndim(k) == 0 else out


def classify(params, k, indeterminate_tol=INDETERMINATE_TOL):
    """StabilitySample at one wavenumber; never raises."""
    num, den, dbf = backend.delta_mi_parts(params.beta, np.asarray(float(k)))
    num, den, dbf = float(num), float(den), float(dbf)
    if abs(den) <= DENOMINATOR_TOL:
        return StabilitySample(params.beta, float(k), dbf, float("nan"), "I")
    dmi = num / den * dbf
    if dmi > indeterminate_tol:
        verdict = "S"
    elif dmi < -indeterminate_tol:
        verdict = "U"
    else:
        verdict = "I"
    return StabilitySample(params.beta, float(k), dbf, dmi, verdict)


def _mechanism_funcs(params):
    beta = params.beta

    def cg_prime(k):
        return 2.0 * backend.m_beta_d1(beta, k) + k * backend.m_beta_d2(beta, k)

    def resonance_long_short(k):
        return backend.m_beta(beta, k) + k * backend.m_beta_d1(beta, k) - 1.0

    def second_harmonic(k):
        return backend.m_beta(beta, k) - backend.m_beta(beta, 2.0 * k)

    def bf(k):
        return backend.delta_bf(beta, k)

    return {1: cg_prime, 2: resonance_long_short, 3: second_harmonic, 4: bf}


def mechanisms(params, k_range=(0.05, 20.0), n_samples=2000):
    """Sign-change locations of the four mechanism functions.

    Scans a uniform sample grid and refines each bracket by bisection;
    returns a list of (k_root, mechanism_id) sorted by k.  An empty list is
    a legitimate result.
    """
    if n_samples < 100:
        raise ValueError("need at least 100 samples for the sign-change scan")
    lo, hi = k_range
    if not (0.0 < lo < hi):
        raise ValueError("k_range must be positive and increasing")
    ks = np.linspace(lo, hi, n_samples)
    roots = []
    for mech_id, fn in _mechanism_funcs(params).items():
        vals = fn(ks)
        sign = np.sign(vals)
        flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
        for i in flips:
            root = brentq(
                lambda k: float(fn(np.asarray(k, dtype=np.float64))),
                ks[i], ks[i + 1], xtol=1e-14, rtol=8.9e-16,
            )
            roots.append((float(root), mech_id))
    return sorted(roots)


def _thread_count():
    env = os.environ.get("CAPWHITHAM_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


@dataclass(frozen=True)
class StabilityMap:
    """Index values on a (beta, k) grid plus the critical-frequency curve."""

    betas: np.ndarray
    ks: np.ndarray
    delta_bf: np.ndarray   # shape (len(betas), len(ks))
    delta_mi: np.ndarray
    verdicts: np.ndarray   # '<U1' array of S/U/I
    curve: list            # (beta, k_crit(beta, 1)) polyline

    def verdict_counts(self):
        flat = self.verdicts.ravel().tolist()
        return {v: flat.count(v) for v in ("S", "U", "I")}


def _map_row(args):
    beta, ks, indeterminate_tol = args
    num, den, dbf = backend.delta_mi_parts(beta, ks)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        dmi = np.where(np.abs(den) > DENOMINATOR_TOL,
                       num / np.where(den == 0.0, 1.0, den) * dbf, np.nan)
    verdicts = np.full(ks.shape, "I", dtype="<U1")
    verdicts[dmi > indeterminate_tol] = "S"
    verdicts[dmi < -indeterminate_tol] = "U"
    return dbf, dmi, verdicts


def stability_map(
    beta_range=(0.02, 0.33),
    k_range=(0.05, 12.0),
    resolution=(64, 64),
    indeterminate_tol=INDETERMINATE_TOL,
    curve_betas=None,
):
    """Verdict map over a (beta, k) rectangle (rows are beta values).

    Cells where the denominator vanishes or |Delta_MI| falls inside the
    indeterminate band are flagged 'I', never a failure.  Also returns the
    beta -> k_crit(beta, 1) curve restricted to the weak regime.
    """
    n_beta, n_k = resolution
    if n_beta < 32 or n_k < 32:
        raise ValueError("resolution must be at least 32x32")
    betas = np.linspace(beta_range[0], beta_range[1], n_beta)
    ks = np.linspace(k_range[0], k_range[1], n_k)

    jobs = [(float(b), ks, indeterminate_tol) for b in betas]
    workers = _thread_count()
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_map_row, jobs))
    else:
        rows = [_map_row(j) for j in jobs]

    dbf = np.stack([r[0] for r in rows])
    dmi = np.stack([r[1] for r in rows])
    verdicts = np.stack([r[2] for r in rows])

    from .dispersion import BondParams

    if curve_betas is None:
        curve_betas = [b for b in betas if 0.0 < b < 1.0 / 3.0]
    curve = []
    for b in curve_betas:
        params = BondParams(float(b))
        curve.append((float(b), k_crit(params, 1.0)))

    return StabilityMap(betas=betas, ks=ks, delta_bf=dbf, delta_mi=dmi,
                        verdicts=verdicts, curve=curve)


def supercritical_branch_start(params):
    """Left endpoint of the wavenumber branch the periodic end states live on."""
    return phase_speed_min(params)[0]
