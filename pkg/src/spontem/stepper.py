"""March the discretized integral equation and collect the modal trajectory."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend as _backend
from .collocation import Scheme
from .kernels import Physics
from .numkit import legendre_table, legendre_transform_pair

__all__ = [
    "Trajectory",
    "solve",
    "update_history",
    "atomic_probability",
    "error_E",
]


@dataclass
class Trajectory:
    """Grid solution alpha[m, j, k] with evaluation helpers.

    The stored coefficients carry the rotating phase removed; the physical
    modal amplitudes are a_m(t) = exp(-i omega t) alpha_m(t).
    """

    disc: "object"
    phys: Physics
    alpha: np.ndarray  # (N, p, q)
    _tinv: np.ndarray | None = field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.alpha.shape[1]

    def node_times(self) -> np.ndarray:
        return self.disc.node_times()

    def legendre_coeffs(self) -> np.ndarray:
        """Per-step Legendre coefficients of the solution, shape (N, p, q)."""
        if self._tinv is None:
            _, self._tinv = legendre_transform_pair(self.disc.q, self.disc.dt)
        return self.alpha @ self._tinv.T

    def eval_at(self, t: float) -> np.ndarray:
        """Modal values alpha_m(t) by Legendre interpolation on the
        subinterval containing t (right-closed)."""
        disc = self.disc
        if not 0.0 <= t <= disc.T * (1 + 1e-12):
            raise ValueError(f"t={t} outside trajectory range [0, {disc.T}]")
        j = min(disc.N - 1, max(0, int(np.ceil(t / disc.dt)) - 1))
        tau = t - j * disc.dt
        coeffs = self.legendre_coeffs()[j]  # (p, q)
        basis = legendre_table(disc.q, np.array([tau]), disc.dt)[:, 0]
        return coeffs @ basis

    def modal_amplitudes_at(self, t: float) -> np.ndarray:
        """a_m(t) = exp(-i omega t) alpha_m(t)."""
        return np.exp(-1j * self.phys.omega * t) * self.eval_at(t)

    def probability_series(self) -> np.ndarray:
        """P_a at every collocation node, shape (N, q)."""
        return np.sum(np.abs(self.alpha) ** 2, axis=1)


def update_history(h: np.ndarray, damp: np.ndarray, h_mat: np.ndarray,
                   alpha_old: np.ndarray) -> np.ndarray:
    """One application of the history recurrence:
    h <- damp * h + (one-step update array applied to the step leaving the
    local window)."""
    return damp[None, None, :] * h + np.einsum("klu,nl->nku", h_mat, alpha_old)


def _empty_history(p: int, q: int):
    return (
        np.zeros((p, p, 0), dtype=complex),
        np.zeros((q, q, 0), dtype=complex),
        np.zeros(0, dtype=complex),
    )


def solve(scheme: Scheme, source, backend: str | None = None) -> Trajectory:
    """Run the fast (compressed-history) solver for the given source."""
    disc, phys = scheme.disc, scheme.phys
    f_nodes = np.ascontiguousarray(source.node_values(disc), dtype=complex)
    if f_nodes.shape != (disc.N, phys.p, disc.q):
        raise ValueError(f"source grid has shape {f_nodes.shape}, "
                         f"expected {(disc.N, phys.p, disc.q)}")
    if scheme.history_active:
        w_k = np.ascontiguousarray(scheme.w_k)
        h_mat = np.ascontiguousarray(scheme.h_arr)
        damp = np.ascontiguousarray(scheme.damp)
    else:
        w_k, h_mat, damp = _empty_history(phys.p, disc.q)
    mod = _backend.step_module(backend)
    alpha = mod.march_fast(
        disc.N, disc.M, scheme.kappa,
        np.ascontiguousarray(scheme.sys_lu.lu), np.ascontiguousarray(scheme.sys_lu.piv),
        np.ascontiguousarray(scheme.l_arr), w_k, h_mat, damp, f_nodes,
    )
    return Trajectory(disc, phys, alpha)


def atomic_probability(traj: Trajectory, t: float) -> float:
    """P_a(t) = sum_n |alpha_n(t)|^2; invariant under the rotating phase."""
    return float(np.sum(np.abs(traj.eval_at(t)) ** 2))


def error_E(traj: Trajectory, ref: Trajectory, t: float) -> float:
    """Modal l2 deviation from a reference trajectory at time t; the
    shorter mode list is zero-padded."""
    a = traj.eval_at(t)
    b = ref.eval_at(t)
    p = max(a.size, b.size)
    a = np.pad(a, (0, p - a.size))
    b = np.pad(b, (0, p - b.size))
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2)))
