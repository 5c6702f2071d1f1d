"""Pure-NumPy marching loops (fallback backend for the compiled core)."""

from __future__ import annotations

import numpy as np
import scipy.linalg

BACKEND_NAME = "python"


def march_fast(N, M, kappa, lu, piv, l_arr, w_k, h_mat, damp, f_nodes):
    """Step the collocation system with compressed history.

    l_arr: (p, p, q, q, M-1) local window, slice nu consumes lag M-1-nu.
    w_k / h_mat / damp: history weights, one-step update array, per-step
    damping factors; empty arrays when the history never activates.
    f_nodes: (N, p, q) source samples at the collocation nodes.
    Returns the full grid solution (N, p, q).
    """
    p, q = f_nodes.shape[1:]
    n_e = damp.size
    hist = n_e > 0
    alpha = np.empty((N, p, q), dtype=complex)
    ring = np.zeros((M, p, q), dtype=complex)
    h = np.zeros((p, q, n_e), dtype=complex)
    for j in range(1, N + 1):
        if hist and j >= M + 1:
            old = ring[(j - M - 1) % M]
            h = damp[None, None, :] * h + np.einsum("klu,nl->nku", h_mat, old, optimize=True)
        b = f_nodes[j - 1].copy()
        lo = max(0, M - j)
        if lo < M - 1:
            steps = np.arange(j - M + lo + 1, j)
            past = ring[(steps - 1) % M]
            b -= kappa * np.einsum("mnklv,vnl->mk", l_arr[..., lo:], past, optimize=True)
        if hist and j >= M + 1:
            b -= kappa * np.einsum("mnu,nku->mk", w_k, h, optimize=True)
        x = scipy.linalg.lu_solve((lu, piv), b.reshape(-1)).reshape(p, q)
        ring[(j - 1) % M] = x
        alpha[j - 1] = x
    return alpha


def march_direct(N, kappa, lu, piv, d_arr, f_nodes):
    """Reference stepping with the dense (uncompressed) history.

    d_arr: (p, p, q, q, N-1) whole-step integrals indexed by lag-1; the sum
    at step j runs over all j-1 previous steps, so the per-step cost grows
    linearly and the total cost quadratically with N.
    """
    p, q = f_nodes.shape[1:]
    alpha = np.empty((N, p, q), dtype=complex)
    for j in range(1, N + 1):
        b = f_nodes[j - 1].copy()
        if j > 1:
            past = alpha[j - 2 :: -1]  # lag order 1..j-1
            b -= kappa * np.einsum("mnkld,dnl->mk", d_arr[..., : j - 1], past, optimize=True)
        x = scipy.linalg.lu_solve((lu, piv), b.reshape(-1)).reshape(p, q)
        alpha[j - 1] = x
    return alpha
