# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hypergeometric series kernel.

Must stay operation-for-operation identical to ``_series_py.pfq_sum``; the test
suite checks both backends against each other.
"""

from libc.math cimport cos, exp, log, sin, sqrt


def pfq_sum(const double[::1] a, const double[::1] b, double log_abs_x, double phase,
            int real_sign, Py_ssize_t max_terms, double rel_tol):
    cdef Py_ssize_t n, i
    cdef Py_ssize_t p = a.shape[0]
    cdef Py_ssize_t q = b.shape[0]
    cdef double log_t = 0.0
    cdef double scale = 0.0
    cdef double sre = 1.0
    cdef double sim = 0.0
    cdef double step, nn, k, f, w, mag, r, tail
    cdef double tail_log = 0.0
    cdef bint converged = False

    for n in range(max_terms):
        nn = <double>n
        step = log_abs_x - log(nn + 1.0)
        for i in range(p):
            step += log(a[i] + nn)
        for i in range(q):
            step -= log(b[i] + nn)
        log_t = log_t + step
        k = nn + 1.0
        if log_t > scale:
            f = exp(scale - log_t)
            sre = sre * f
            sim = sim * f
            scale = log_t
        w = exp(log_t - scale)
        if real_sign == 0:
            sre = sre + w * cos(k * phase)
            sim = sim + w * sin(k * phase)
        elif real_sign > 0 or (n % 2) == 1:
            sre = sre + w
        else:
            sre = sre - w
        mag = sqrt(sre * sre + sim * sim)
        if w < rel_tol * mag:
            r = exp(step)
            if r < 1.0:
                tail = w * r / (1.0 - r)
                if tail < rel_tol * mag:
                    tail_log = (log(tail) + scale) if tail > 0.0 else -1.0e308
                    converged = True
                    return sre, sim, scale, tail_log, n + 2, converged
    return sre, sim, scale, tail_log, max_terms + 1, converged
