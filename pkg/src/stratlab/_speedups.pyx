# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels for packed sparse polynomial systems.

Mirrors stratlab._pure; flow integration and orbit exploration spend nearly
all of their time in these two entry points.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline double _ipow(double base, long k) nogil:
    cdef double result = 1.0
    while k > 0:
        if k & 1:
            result *= base
        base *= base
        k >>= 1
    return result


def eval_system(double[::1] coeffs, long[:, ::1] exps, long[::1] starts,
                double[::1] x, double[::1] out):
    """Evaluate a packed sparse polynomial system at one point."""
    cdef Py_ssize_t ncomp = starts.shape[0] - 1
    cdef Py_ssize_t nvars = exps.shape[1]
    cdef Py_ssize_t i, t, j
    cdef double acc, term
    cdef long k
    with nogil:
        for i in range(ncomp):
            acc = 0.0
            for t in range(starts[i], starts[i + 1]):
                term = coeffs[t]
                for j in range(nvars):
                    k = exps[t, j]
                    if k == 1:
                        term *= x[j]
                    elif k > 1:
                        term *= _ipow(x[j], k)
                acc += term
            out[i] = acc
    return np.asarray(out)


def eval_jacobian(double[::1] coeffs, long[:, ::1] exps, long[::1] starts,
                  double[::1] x, double[:, ::1] out):
    """Evaluate the system Jacobian at one point into out[ncomp, nvars]."""
    cdef Py_ssize_t ncomp = starts.shape[0] - 1
    cdef Py_ssize_t nvars = exps.shape[1]
    cdef Py_ssize_t i, t, j, v
    cdef double term
    cdef long k
    with nogil:
        for i in range(ncomp):
            for v in range(nvars):
                out[i, v] = 0.0
            for t in range(starts[i], starts[i + 1]):
                for v in range(nvars):
                    k = exps[t, v]
                    if k == 0:
                        continue
                    term = coeffs[t] * k
                    for j in range(nvars):
                        if j == v:
                            if k > 1:
                                term *= _ipow(x[j], k - 1)
                        else:
                            if exps[t, j] == 1:
                                term *= x[j]
                            elif exps[t, j] > 1:
                                term *= _ipow(x[j], exps[t, j])
                    out[i, v] += term
    return np.asarray(out)
