# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the dense complex kernels.

Every routine here has a numpy twin in ``_fallback`` with the same
signature; ``hermetic._kernels`` picks one at import time.
"""

import numpy as np

from libc.math cimport sqrt


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def _offsets(dims, mask):
    # flat-index offsets contributed by the subsystems selected by ``mask``
    n = len(dims)
    strides = [1] * n
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * dims[i + 1]
    offs = np.zeros(1, dtype=np.intp)
    for i in range(n):
        if mask[i]:
            offs = (offs[:, None] + np.arange(dims[i], dtype=np.intp)[None, :] * strides[i]).ravel()
    return offs


def partial_trace(rho, dims, keep):
    """Trace out every subsystem whose index is not in ``keep``."""
    cdef const double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
    keep_set = set(keep)
    kmask = [i in keep_set for i in range(len(dims))]
    tmask = [not m for m in kmask]
    cdef Py_ssize_t[::1] ko = _offsets(dims, kmask)
    cdef Py_ssize_t[::1] to = _offsets(dims, tmask)
    cdef Py_ssize_t nk = ko.shape[0], nt = to.shape[0]
    out_arr = np.zeros((nk, nk), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t a, b, t
    cdef double complex acc
    with nogil:
        for a in range(nk):
            for b in range(nk):
                acc = 0
                for t in range(nt):
                    acc = acc + r[ko[a] + to[t], ko[b] + to[t]]
                out[a, b] = acc
    return out_arr


def kron(a, b):
    """Kronecker product of two 2-d complex arrays."""
    cdef const double complex[:, ::1] x = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const double complex[:, ::1] y = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t ra = x.shape[0], ca = x.shape[1], rb = y.shape[0], cb = y.shape[1]
    out_arr = np.empty((ra * rb, ca * cb), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k, l
    cdef double complex xij
    with nogil:
        # output rows in order so writes stay contiguous
        for i in range(ra):
            for k in range(rb):
                for j in range(ca):
                    xij = x[i, j]
                    for l in range(cb):
                        out[i * rb + k, j * cb + l] = xij * y[k, l]
    return out_arr


def gram(vectors):
    """G[j, k] = <v_j|v_k> for the rows v_j of ``vectors``."""
    cdef const double complex[:, ::1] v = np.ascontiguousarray(vectors, dtype=np.complex128)
    cdef Py_ssize_t n = v.shape[0], d = v.shape[1]
    out_arr = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t j, k, i
    cdef double complex acc
    with nogil:
        for j in range(n):
            for k in range(j, n):
                acc = 0
                for i in range(d):
                    acc = acc + v[j, i].conjugate() * v[k, i]
                out[j, k] = acc
                out[k, j] = acc.conjugate()
    return out_arr


def pivoted_cholesky(a, double tol):
    """Diagonally pivoted Cholesky of a Hermitian PSD matrix.

    Returns ``(L, rank)`` with ``L`` of shape (n, rank), rows in the original
    index order, so that ``L @ L.conj().T`` reproduces ``a`` up to the
    discarded pivots (each at most ``tol``).
    """
    cdef const double complex[:, ::1] A = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = A.shape[0]
    L_arr = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] L = L_arr
    d_arr = np.array(np.real(np.diagonal(a)), dtype=np.float64, copy=True)
    cdef double[::1] d = d_arr
    cdef Py_ssize_t[::1] perm = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t k, i, m, j, p, q, tmp
    cdef double best, piv
    cdef double complex acc
    cdef Py_ssize_t rank = 0
    with nogil:
        for k in range(n):
            j = k
            best = d[perm[k]]
            for i in range(k + 1, n):
                if d[perm[i]] > best:
                    best = d[perm[i]]
                    j = i
            if best <= tol:
                break
            tmp = perm[k]
            perm[k] = perm[j]
            perm[j] = tmp
            p = perm[k]
            piv = sqrt(best)
            L[p, k] = piv
            for i in range(k + 1, n):
                q = perm[i]
                acc = A[q, p]
                for m in range(k):
                    acc = acc - L[q, m] * L[p, m].conjugate()
                L[q, k] = acc / piv
                d[q] = d[q] - cabs2(L[q, k])
            rank = k + 1
    return L_arr[:, :rank].copy(), rank
