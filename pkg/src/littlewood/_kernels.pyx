# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan prefilter.  Mirrors ``_fallback.prefilter`` exactly."""

import numpy as np

from libc.math cimport floor, fabs, INFINITY


cdef inline double _nearest_dist(double t) noexcept nogil:
    cdef double f = t - floor(t)
    if f <= 0.5:
        return f
    return 1.0 - f


def prefilter(long long q_from, long long q_to, double alpha, double shift_a,
              double beta, double shift_b, bint second, long long[:] chain):
    """Return every q in [q_from, q_to] that can still be a strict running
    minimum of ``m(q) * ||q*alpha - shift_a|| * ||q*beta - shift_b||``.

    ``m(q)`` is ``q`` or, when ``chain`` is non-empty, ``q / n*`` with ``n*``
    the largest chain element dividing ``q``.  The float error bound is
    rigorous for ``q < 2**50``, so no true record is ever dropped.
    """
    cdef Py_ssize_t n = q_to - q_from + 1
    out = np.empty(max(n, 0), dtype=np.int64)
    cdef long long[:] o = out
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t j
    cdef Py_ssize_t nchain = chain.shape[0]
    cdef long long q, nk, m
    cdef double u = 1.1102230246251565e-16   # 2**-53
    cdef double tiny = 1.3877787807814457e-17  # 2**-56
    cdef double f1, f2, e1, e2, P, err, qd
    cdef double best = INFINITY
    with nogil:
        for q in range(q_from, q_to + 1):
            qd = <double>q
            f1 = _nearest_dist(qd * alpha - shift_a)
            e1 = 4.0 * u * (qd * fabs(alpha) + fabs(shift_a) + 1.0) + tiny * (qd + 1.0)
            if second:
                f2 = _nearest_dist(qd * beta - shift_b)
                e2 = 4.0 * u * (qd * fabs(beta) + fabs(shift_b) + 1.0) + tiny * (qd + 1.0)
            else:
                f2 = 1.0
                e2 = 0.0
            m = q
            if nchain > 0:
                nk = 1
                for j in range(nchain):
                    if chain[j] > q or q % chain[j] != 0:
                        break
                    nk = chain[j]
                m = q // nk
            P = (<double>m) * f1 * f2
            err = 2.0 * ((<double>m) * (e1 * (f2 + e2) + (f1 + e1) * e2) + 4.0 * u * P)
            if P - err < best:
                o[count] = q
                count += 1
            if P + err < best:
                best = P + err
    return out[:count]
