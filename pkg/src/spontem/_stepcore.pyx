# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled marching loops; mirrors the NumPy implementations in _steppy."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef void _lu_solve_inplace(double complex[:, ::1] lu, long[::1] piv,
                            double complex* x, Py_ssize_t n) noexcept nogil:
    # Factors and pivot layout as produced by LAPACK zgetrf: row i was
    # swapped with piv[i] in order, L unit-lower, U upper.
    cdef Py_ssize_t i, j
    cdef double complex tmp, acc
    for i in range(n):
        j = piv[i]
        if j != i:
            tmp = x[i]
            x[i] = x[j]
            x[j] = tmp
    for i in range(1, n):
        acc = x[i]
        for j in range(i):
            acc = acc - lu[i, j] * x[j]
        x[i] = acc
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for j in range(i + 1, n):
            acc = acc - lu[i, j] * x[j]
        x[i] = acc / lu[i, i]


def march_fast(Py_ssize_t N, Py_ssize_t M, double kappa,
               cnp.ndarray lu_arr, cnp.ndarray piv_arr,
               cnp.ndarray l_arr_a, cnp.ndarray w_k_a,
               cnp.ndarray h_mat_a, cnp.ndarray damp_a,
               cnp.ndarray f_nodes_a):
    cdef double complex[:, ::1] lu = np.ascontiguousarray(lu_arr, dtype=complex)
    cdef long[::1] piv = np.ascontiguousarray(piv_arr, dtype=np.int64)
    cdef double complex[:, :, :, :, ::1] l_arr = np.ascontiguousarray(l_arr_a, dtype=complex)
    cdef double complex[:, :, ::1] w_k = np.ascontiguousarray(w_k_a, dtype=complex)
    cdef double complex[:, :, ::1] h_mat = np.ascontiguousarray(h_mat_a, dtype=complex)
    cdef double complex[::1] damp = np.ascontiguousarray(damp_a, dtype=complex)
    cdef double complex[:, :, ::1] f_nodes = np.ascontiguousarray(f_nodes_a, dtype=complex)

    cdef Py_ssize_t p = f_nodes.shape[1]
    cdef Py_ssize_t q = f_nodes.shape[2]
    cdef Py_ssize_t n_e = damp.shape[0]
    cdef bint hist = n_e > 0

    alpha_np = np.empty((N, p, q), dtype=complex)
    cdef double complex[:, :, ::1] alpha = alpha_np
    ring_np = np.zeros((M, p, q), dtype=complex)
    cdef double complex[:, :, ::1] ring = ring_np
    h_np = np.zeros((p, q, n_e), dtype=complex)
    cdef double complex[:, :, ::1] h = h_np
    b_np = np.empty(p * q, dtype=complex)
    cdef double complex[::1] b = b_np

    cdef Py_ssize_t j, m, n, k, l, nu, mu, lo, step, slot
    cdef double complex acc, a_old

    with nogil:
        for j in range(1, N + 1):
            if hist and j >= M + 1:
                slot = (j - M - 1) % M
                for n in range(p):
                    for k in range(q):
                        for mu in range(n_e):
                            h[n, k, mu] = damp[mu] * h[n, k, mu]
                    for l in range(q):
                        a_old = ring[slot, n, l]
                        for k in range(q):
                            for mu in range(n_e):
                                h[n, k, mu] = h[n, k, mu] + h_mat[k, l, mu] * a_old
            for m in range(p):
                for k in range(q):
                    acc = f_nodes[j - 1, m, k]
                    lo = M - j
                    if lo < 0:
                        lo = 0
                    for nu in range(lo, M - 1):
                        step = j - M + nu + 1  # 1-based index of the past step
                        slot = (step - 1) % M
                        for n in range(p):
                            for l in range(q):
                                acc = acc - kappa * l_arr[m, n, k, l, nu] * ring[slot, n, l]
                    if hist and j >= M + 1:
                        for n in range(p):
                            for mu in range(n_e):
                                acc = acc - kappa * w_k[m, n, mu] * h[n, k, mu]
                    b[m * q + k] = acc
            _lu_solve_inplace(lu, piv, &b[0], p * q)
            slot = (j - 1) % M
            for m in range(p):
                for k in range(q):
                    ring[slot, m, k] = b[m * q + k]
                    alpha[j - 1, m, k] = b[m * q + k]
    return alpha_np


def march_direct(Py_ssize_t N, double kappa,
                 cnp.ndarray lu_arr, cnp.ndarray piv_arr,
                 cnp.ndarray d_arr_a, cnp.ndarray f_nodes_a):
    cdef double complex[:, ::1] lu = np.ascontiguousarray(lu_arr, dtype=complex)
    cdef long[::1] piv = np.ascontiguousarray(piv_arr, dtype=np.int64)
    cdef double complex[:, :, :, :, ::1] d_arr = np.ascontiguousarray(d_arr_a, dtype=complex)
    cdef double complex[:, :, ::1] f_nodes = np.ascontiguousarray(f_nodes_a, dtype=complex)

    cdef Py_ssize_t p = f_nodes.shape[1]
    cdef Py_ssize_t q = f_nodes.shape[2]

    alpha_np = np.empty((N, p, q), dtype=complex)
    cdef double complex[:, :, ::1] alpha = alpha_np
    b_np = np.empty(p * q, dtype=complex)
    cdef double complex[::1] b = b_np

    cdef Py_ssize_t j, m, n, k, l, d
    cdef double complex acc

    with nogil:
        for j in range(1, N + 1):
            for m in range(p):
                for k in range(q):
                    acc = f_nodes[j - 1, m, k]
                    for d in range(1, j):
                        for n in range(p):
                            for l in range(q):
                                acc = acc - kappa * d_arr[m, n, k, l, d - 1] * alpha[j - 1 - d, n, l]
                    b[m * q + k] = acc
            _lu_solve_inplace(lu, piv, &b[0], p * q)
            for m in range(p):
                for k in range(q):
                    alpha[j - 1, m, k] = b[m * q + k]
    return alpha_np
