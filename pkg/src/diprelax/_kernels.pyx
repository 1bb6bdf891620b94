# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend (hot loops of the cross-section evaluation).

Function-for-function mirror of :mod:`diprelax.kernels_py`; keep the two in
lockstep.  The Monte-Carlo reduction is a single fused pass with no
temporaries, which is where the compiled path pays off.
"""

from libc.math cimport log, log1p, sqrt

import numpy as np

BACKEND_NAME = "compiled"

cdef double _PI = 3.141592653589793
cdef double _C_FLIP = 8.0 * _PI / 15.0
cdef double _C_ELASTIC = 16.0 * _PI / 45.0


cdef inline double _h(double x) nogil:
    cdef double d, num
    if x == 1.0:
        return -0.5
    if x > 1e7:
        return 1.0 - 4.0 / (x * x)
    d = x - 1.0
    if d < 1e-4:
        num = d * (2.0 + d)
        return -0.5 - 0.75 * num * num / ((1.0 + d) * (2.0 + d * (2.0 + d))) * log(d / (2.0 + d))
    num = 1.0 - x * x
    return -0.5 - 0.75 * num * num / (x * (1.0 + x * x)) * log1p(-2.0 / (x + 1.0))


def exchange_ratio(double[::1] x):
    """Elementwise exchange ratio h for x >= 1 (limit -1/2 at 1)."""
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _h(x[i])
    return out_arr


cdef inline double _sigma_v(double E, double dE, double bracket_sq, double spin,
                            double w0, double w1, double w2, double mass) nogil:
    cdef double tot, r
    tot = w0 * 0.5 * _C_ELASTIC * spin * spin * spin * spin * bracket_sq \
        * 2.0 * sqrt(E / mass)
    if w1 != 0.0:
        r = sqrt(1.0 + dE / E) if E > 0.0 else 1e300
        tot += w1 * _C_FLIP * spin * spin * spin * bracket_sq \
            * (1.0 + _h(r)) * 2.0 * sqrt((E + dE) / mass)
    if w2 != 0.0:
        r = sqrt(1.0 + 2.0 * dE / E) if E > 0.0 else 1e300
        tot += w2 * _C_FLIP * spin * spin * bracket_sq \
            * (1.0 + _h(r)) * 2.0 * sqrt((E + 2.0 * dE) / mass)
    return tot


def weighted_sigma_v(double[::1] E, double dE, double bracket_sq, double spin,
                     double w0, double w1, double w2, double mass):
    """Elementwise (w0 s0 + w1 s1 + w2 s2)(E) * v_rel(E) in m^3/s."""
    cdef Py_ssize_t i, n = E.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _sigma_v(E[i], dE, bracket_sq, spin, w0, w1, w2, mass)
    return out_arr


def weighted_sigma_v_mean(double[::1] usq, double kT, double dE, double bracket_sq,
                          double spin, double w0, double w1, double w2, double mass):
    """Monte-Carlo reduction: mean of weighted sigma*v over chi^2_3 draws."""
    cdef Py_ssize_t i, n = usq.shape[0]
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            acc += _sigma_v(0.5 * kT * usq[i], dE, bracket_sq, spin, w0, w1, w2, mass)
    return acc / n
