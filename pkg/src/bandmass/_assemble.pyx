# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched assembly of fiber matrices."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def assemble(double[:, ::1] thetas, double[:, ::1] taus, long long[::1] tails,
             long long[::1] heads, double[::1] weights, double[::1] diag):
    cdef Py_ssize_t nb = thetas.shape[0]
    cdef Py_ssize_t d = thetas.shape[1]
    cdef Py_ssize_t ne = taus.shape[0]
    cdef Py_ssize_t nv = diag.shape[0]
    cdef Py_ssize_t b, k, a, u
    cdef long long t, h
    cdef double ph, c, s, w
    out = np.zeros((nb, nv, nv), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    for b in range(nb):
        for u in range(nv):
            o[b, u, u] = diag[u]
        for k in range(ne):
            ph = 0.0
            for a in range(d):
                ph = ph + taus[k, a] * thetas[b, a]
            c = cos(ph)
            s = sin(ph)
            w = weights[k]
            t = tails[k]
            h = heads[k]
            o[b, t, h] = o[b, t, h] - w * (c + 1j * s)
            o[b, h, t] = o[b, h, t] - w * (c - 1j * s)
    return out
