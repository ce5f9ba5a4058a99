# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: banded tent-kernel convolution and the geometric
resolvent series built on it.  Semantics match ``_core_py`` exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef void _convolve(const double[:, ::1] band,
                    const double[::1] a_minus, const double[::1] a_plus,
                    const double[::1] f, double f_left, double f_right,
                    double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = band.shape[0]
    cdef Py_ssize_t bw = band.shape[1]
    cdef Py_ssize_t half = (bw - 1) // 2
    cdef Py_ssize_t i, k, k0, k1
    cdef double acc
    for i in range(n):
        k0 = half - i
        if k0 < 0:
            k0 = 0
        k1 = n - 1 - i + half
        if k1 > bw - 1:
            k1 = bw - 1
        acc = 0.0
        for k in range(k0, k1 + 1):
            acc += band[i, k] * f[i - half + k]
        out[i] = acc + a_minus[i] * f_left + a_plus[i] * f_right


def band_convolve(const double[:, ::1] band,
                  const double[::1] a_minus, const double[::1] a_plus,
                  const double[::1] f, double f_left, double f_right):
    """Banded quadrature convolution plus endpoint delta masses."""
    cdef Py_ssize_t n = band.shape[0]
    out = np.empty(n)
    cdef double[::1] out_mv = out
    with nogil:
        _convolve(band, a_minus, a_plus, f, f_left, f_right, out_mv)
    return out


def neumann_resolvent(const double[:, ::1] band,
                      const double[::1] a_minus, const double[::1] a_plus,
                      const double[::1] p, const double[::1] g,
                      double tol_abs, int max_terms):
    """Sum the geometric series for (I - L)^{-1} g, where L multiplies by
    the gain p and convolves, the delta masses acting on the running
    term's own endpoint values.

    Returns (f, n_terms, last_term_norm); truncates once the newest term's
    sup norm drops below ``tol_abs`` or ``max_terms`` is hit.
    """
    cdef Py_ssize_t n = band.shape[0]
    f = np.array(g, dtype=np.float64, copy=True)
    cdef double[::1] f_mv = f
    term = np.array(g, dtype=np.float64, copy=True)
    scratch = np.empty(n)
    cdef double[::1] term_mv = term
    cdef double[::1] scratch_mv = scratch
    cdef double[::1] tmp
    cdef double norm = 0.0, v
    cdef Py_ssize_t i
    cdef int terms = 0
    with nogil:
        for i in range(n):
            v = term_mv[i]
            if v < 0.0:
                v = -v
            if v > norm:
                norm = v
        while norm >= tol_abs and terms < max_terms:
            for i in range(n):
                scratch_mv[i] = p[i] * term_mv[i]
            _convolve(band, a_minus, a_plus, scratch_mv,
                      p[0] * term_mv[0], p[n - 1] * term_mv[n - 1], term_mv)
            norm = 0.0
            for i in range(n):
                f_mv[i] += term_mv[i]
                v = term_mv[i]
                if v < 0.0:
                    v = -v
                if v > norm:
                    norm = v
            terms += 1
    return f, terms, norm
