"""Pure-numpy implementations of the scalar symbol kernels.

These closed-form evaluations (the phase-speed symbol of the
gravity-capillary Whitham equation, its derivatives, the rescaled long-wave
symbol, and the modulational stability indices built from them) are the
innermost loops of the package: every multiplier application, root find,
and stability-map cell calls them.  A compiled twin lives in
``_kernels.pyx``; ``capwhitham.backend`` selects whichever imports.  Both
follow the same branch structure and operation order so they agree to
rounding.

All functions take a scalar Bond number ``beta`` and a float64 array of
wavenumbers, and return an array of the same shape.
"""

import numpy as np

# tanh(k)/k = 1 + A1*k^2 + A2*k^4 + A3*k^6 + O(k^8) below this threshold;
# at k = 1e-4 the first omitted term is ~5e-26, so the two branches agree
# to better than 1e-14.
SMALL_K = 1e-4
A1 = -1.0 / 3.0
A2 = 2.0 / 15.0
A3 = -17.0 / 315.0


def _sech2(k):
    # sech^2 via exp(-|k|) to stay finite for large arguments
    e = np.exp(-np.abs(k))
    s = 2.0 * e / (1.0 + e * e)
    return s * s


def _t_funcs(k, order):
    """tanh(k)/k and its first ``order`` derivatives, total on the reals."""
    small = np.abs(k) < SMALL_K
    safe = np.where(small, 1.0, k)
    k2 = k * k
    th = np.tanh(safe)
    t0 = np.where(small, 1.0 + k2 * (A1 + k2 * (A2 + k2 * A3)), th / safe)
    if order == 0:
        return (t0,)
    s2 = _sech2(safe)
    t1 = np.where(
        small,
        k * (2.0 * A1 + k2 * (4.0 * A2 + k2 * (6.0 * A3))),
        (s2 - th / safe) / safe,
    )
    if order == 1:
        return t0, t1
    t2 = np.where(
        small,
        2.0 * A1 + k2 * (12.0 * A2 + k2 * (30.0 * A3)),
        -(2.0 / safe) * t1 - 2.0 * s2 * th / safe,
    )
    return t0, t1, t2


def m_beta(beta, k):
    """Phase speed sqrt((1 + beta*k^2) * tanh(k)/k); equals 1 at k = 0."""
    (t0,) = _t_funcs(k, 0)
    return np.sqrt((1.0 + beta * k * k) * t0)


def m_beta_d1(beta, k):
    """First derivative of the phase speed."""
    t0, t1 = _t_funcs(k, 1)
    p = 1.0 + beta * k * k
    f = p * t0
    fp = 2.0 * beta * k * t0 + p * t1
    return fp / (2.0 * np.sqrt(f))


def m_beta_d2(beta, k):
    """Second derivative of the phase speed; equals (3*beta - 1)/3 at k = 0."""
    t0, t1, t2 = _t_funcs(k, 2)
    p = 1.0 + beta * k * k
    f = p * t0
    fp = 2.0 * beta * k * t0 + p * t1
    fpp = 2.0 * beta * t0 + 4.0 * beta * k * t1 + p * t2
    m = np.sqrt(f)
    return fpp / (2.0 * m) - fp * fp / (4.0 * f * m)


def l_eps(beta, gamma, eps, big_k):
    """Rescaled long-wave symbol (m_beta(eps*K) - 1 - gamma*eps^2) / eps^2."""
    return (m_beta(beta, eps * big_k) - 1.0 - gamma * eps * eps) / (eps * eps)


def delta_bf(beta, k):
    """Benjamin-Feir index 2*(m(k) - m(2k)) + ((k*m(k))' - m(0))."""
    mk = m_beta(beta, k)
    m2k = m_beta(beta, 2.0 * k)
    cg = mk + k * m_beta_d1(beta, k)
    return 2.0 * (mk - m2k) + (cg - 1.0)


def delta_mi_parts(beta, k):
    """Pieces of the modulational index.

    Returns ``(numerator, denominator, dbf)`` with
    numerator = (k*m)'' * ((k*m)' - m(0)), denominator = m(k) - m(2k),
    and dbf the Benjamin-Feir index, so that the full index is
    ``numerator / denominator * dbf``.
    """
    mk = m_beta(beta, k)
    m2k = m_beta(beta, 2.0 * k)
    d1 = m_beta_d1(beta, k)
    d2 = m_beta_d2(beta, k)
    cg = mk + k * d1           # (k m)'
    cgp = 2.0 * d1 + k * d2    # (k m)''
    den = mk - m2k
    dbf = 2.0 * den + (cg - 1.0)
    num = cgp * (cg - 1.0)
    return num, den, dbf


def delta_mi(beta, k):
    """Modulational stability index; caller guards the denominator."""
    num, den, dbf = delta_mi_parts(beta, k)
    return num / den * dbf
