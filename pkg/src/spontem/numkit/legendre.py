"""Shifted Legendre polynomials on [0, dt] and the nodal<->modal transform."""

from __future__ import annotations

import numpy as np

from .quadrature import gauss_legendre

__all__ = ["legendre_eval", "legendre_table", "legendre_transform_pair"]


def legendre_table(q: int, tau, dt: float) -> np.ndarray:
    """Values P_l(tau) for l = 0..q-1, shape (q, len(tau)).

    P_l is the degree-l Legendre polynomial mapped affinely to [0, dt] and
    normalized so that P_l(dt) = 1.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    u = 2.0 * tau / dt - 1.0
    out = np.empty((q, tau.size))
    out[0] = 1.0
    if q > 1:
        out[1] = u
    for l in range(2, q):
        out[l] = ((2 * l - 1) * u * out[l - 1] - (l - 1) * out[l - 2]) / l
    return out


def legendre_eval(l: int, tau, dt: float):
    """P_l(tau) on [0, dt] with P_l(dt) = 1."""
    if l < 0:
        raise ValueError("degree must be >= 0")
    vals = legendre_table(l + 1, tau, dt)[l]
    return float(vals[0]) if np.isscalar(tau) else vals


def legendre_transform_pair(q: int, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """(T, Tinv) with T[k, l] = P_l(tau_k) at the Gauss-Legendre nodes on [0, dt].

    Tinv maps nodal values to Legendre coefficients (the discrete Legendre
    transform); T maps back.
    """
    taus = gauss_legendre(q, 0.0, dt).nodes
    t_mat = legendre_table(q, taus, dt).T.copy()
    t_inv = np.linalg.inv(t_mat)
    resid = np.abs(t_mat @ t_inv - np.eye(q)).max()
    if resid > 1e-12:
        raise np.linalg.LinAlgError(
            f"nodal/modal transform inversion residual {resid:.2e} exceeds 1e-12"
        )
    return t_mat, t_inv
