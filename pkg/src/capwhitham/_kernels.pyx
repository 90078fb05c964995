# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the scalar symbol kernels.

Twin of ``_kernels_py``: same branch structure and operation order, scalar
C loops instead of vectorized numpy.  ``capwhitham.backend`` prefers this
module when the extension is built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, sqrt, tanh

cnp.import_array()

cdef double SMALL_K = 1e-4
cdef double A1 = -1.0 / 3.0
cdef double A2 = 2.0 / 15.0
cdef double A3 = -17.0 / 315.0


cdef inline double _sech2(double k) nogil:
    cdef double e = exp(-fabs(k))
    cdef double s = 2.0 * e / (1.0 + e * e)
    return s * s


cdef inline double _t0(double k) nogil:
    cdef double k2 = k * k
    if fabs(k) < SMALL_K:
        return 1.0 + k2 * (A1 + k2 * (A2 + k2 * A3))
    return tanh(k) / k


cdef inline double _t1(double k) nogil:
    cdef double k2 = k * k
    if fabs(k) < SMALL_K:
        return k * (2.0 * A1 + k2 * (4.0 * A2 + k2 * (6.0 * A3)))
    return (_sech2(k) - tanh(k) / k) / k


cdef inline double _t2(double k) nogil:
    cdef double k2 = k * k
    if fabs(k) < SMALL_K:
        return 2.0 * A1 + k2 * (12.0 * A2 + k2 * (30.0 * A3))
    return -(2.0 / k) * _t1(k) - 2.0 * _sech2(k) * tanh(k) / k


cdef inline double _m(double beta, double k) nogil:
    return sqrt((1.0 + beta * k * k) * _t0(k))


cdef inline double _m1(double beta, double k) nogil:
    cdef double p = 1.0 + beta * k * k
    cdef double f = p * _t0(k)
    cdef double fp = 2.0 * beta * k * _t0(k) + p * _t1(k)
    return fp / (2.0 * sqrt(f))


cdef inline double _m2(double beta, double k) nogil:
    cdef double t0 = _t0(k)
    cdef double t1 = _t1(k)
    cdef double p = 1.0 + beta * k * k
    cdef double f = p * t0
    cdef double fp = 2.0 * beta * k * t0 + p * t1
    cdef double fpp = 2.0 * beta * t0 + 4.0 * beta * k * t1 + p * _t2(k)
    cdef double m = sqrt(f)
    return fpp / (2.0 * m) - fp * fp / (4.0 * f * m)


cdef _prepare(k):
    # keep the caller's shape (ascontiguousarray would promote 0-d to 1-d)
    arr = np.asarray(k, dtype=np.float64)
    return arr, np.ascontiguousarray(arr).ravel()


def m_beta(double beta, k):
    """Phase speed sqrt((1 + beta*k^2) * tanh(k)/k); equals 1 at k = 0."""
    arr, flat = _prepare(k)
    out = np.empty_like(flat)
    cdef const double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = _m(beta, src[i])
    return out.reshape(arr.shape)


def m_beta_d1(double beta, k):
    """First derivative of the phase speed."""
    arr, flat = _prepare(k)
    out = np.empty_like(flat)
    cdef const double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = _m1(beta, src[i])
    return out.reshape(arr.shape)


def m_beta_d2(double beta, k):
    """Second derivative of the phase speed; equals (3*beta - 1)/3 at k = 0."""
    arr, flat = _prepare(k)
    out = np.empty_like(flat)
    cdef const double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = _m2(beta, src[i])
    return out.reshape(arr.shape)


def l_eps(double beta, double gamma, double eps, big_k):
    """Rescaled long-wave symbol (m_beta(eps*K) - 1 - gamma*eps^2) / eps^2."""
    arr, flat = _prepare(big_k)
    out = np.empty_like(flat)
    cdef const double[::1] src = flat
    cdef double[::1] dst = out
    cdef double e2 = eps * eps
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = (_m(beta, eps * src[i]) - 1.0 - gamma * e2) / e2
    return out.reshape(arr.shape)


def delta_bf(double beta, k):
    """Benjamin-Feir index 2*(m(k) - m(2k)) + ((k*m(k))' - m(0))."""
    arr, flat = _prepare(k)
    out = np.empty_like(flat)
    cdef const double[::1] src = flat
    cdef double[::1] dst = out
    cdef double kk, mk, cg
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            kk = src[i]
            mk = _m(beta, kk)
            cg = mk + kk * _m1(beta, kk)
            dst[i] = 2.0 * (mk - _m(beta, 2.0 * kk)) + (cg - 1.0)
    return out.reshape(arr.shape)


def delta_mi_parts(double beta, k):
    """Pieces (numerator, denominator, dbf) of the modulational index."""
    arr, flat = _prepare(k)
    num = np.empty_like(flat)
    den = np.empty_like(flat)
    dbf = np.empty_like(flat)
    cdef const double[::1] src = flat
    cdef double[::1] dnum = num
    cdef double[::1] dden = den
    cdef double[::1] ddbf = dbf
    cdef double kk, mk, m2k, d1, d2, cg, cgp
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            kk = src[i]
            mk = _m(beta, kk)
            m2k = _m(beta, 2.0 * kk)
            d1 = _m1(beta, kk)
            d2 = _m2(beta, kk)
            cg = mk + kk * d1
            cgp = 2.0 * d1 + kk * d2
            dden[i] = mk - m2k
            ddbf[i] = 2.0 * (mk - m2k) + (cg - 1.0)
            dnum[i] = cgp * (cg - 1.0)
    shape = arr.shape
    return num.reshape(shape), den.reshape(shape), dbf.reshape(shape)


def delta_mi(double beta, k):
    """Modulational stability index; caller guards the denominator."""
    num, den, dbf = delta_mi_parts(beta, k)
    return num / den * dbf
