"""Collocation grid and precomputed arrays for the marching scheme.

The integral operator applied to the solution on one subinterval reduces,
after expanding the solution in shifted Legendre polynomials, to fixed
arrays of kernel-against-polynomial integrals. Composing them with the
discrete Legendre transform lets every step act directly on grid values:
a current-time block (square, enters the implicit system), a local block
per backward lag, and an exponential-history block per compression mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import KernelBank, Physics, eval_kn, kmn_prefactor
from .numkit import (
    DenseLU,
    adaptive_quad_batch,
    gauss_legendre,
    legendre_table,
    legendre_transform_pair,
    lu_factor,
)
from .soe import SQRT2, SoeK, lift_soe_to_K

__all__ = [
    "Discretization",
    "Scheme",
    "build_grid",
    "choose_M",
    "kernel_suite",
    "precompute_C",
    "precompute_L",
    "precompute_H",
    "lag_integrals",
    "build_system",
    "build_scheme",
]


@dataclass(frozen=True)
class Discretization:
    """Uniform time grid with q Gauss-Legendre collocation nodes per step."""

    T: float
    N: int
    q: int
    M: int
    dt: float = field(init=False)
    taus: np.ndarray = field(init=False)
    tau_weights: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.T <= 0 or self.N < 1 or self.q < 1 or self.M < 1:
            raise ValueError("need T > 0, N >= 1, q >= 1, M >= 1")
        object.__setattr__(self, "dt", self.T / self.N)
        rule = gauss_legendre(self.q, 0.0, self.dt)
        object.__setattr__(self, "taus", rule.nodes)
        object.__setattr__(self, "tau_weights", rule.weights)

    def node_times(self) -> np.ndarray:
        """All collocation times t_jk as an (N, q) array, strictly increasing."""
        return (np.arange(self.N) * self.dt)[:, None] + self.taus[None, :]

    @property
    def history_active(self) -> bool:
        return self.N >= self.M + 1


def choose_M(T: float, N: int, phys: Physics, delta: float = 20.0) -> int:
    """Smallest window length with (M-1)*dt covering the small-time kernel range."""
    dt = T / N
    need = phys.sigma * delta / (SQRT2 * phys.c)
    return int(math.ceil(need / dt)) + 1


def build_grid(T: float, N: int, q: int, M: int) -> Discretization:
    return Discretization(T=float(T), N=int(N), q=int(q), M=int(M))


def kernel_suite(bank: KernelBank, phys: Physics):
    """(ksum, prefactor): evaluator of k_{m+n} against physical time gaps,
    plus the mode-pair scaling. Tests may substitute stubs for both."""
    scale = phys.c / phys.sigma

    def ksum(nsum: int, gap):
        return eval_kn(bank, nsum, scale * np.asarray(gap))

    return ksum, kmn_prefactor


def _stacked_integrand(ksum, p: int, q: int, dt: float, gap_of_s):
    def f(s: np.ndarray) -> np.ndarray:
        gaps = gap_of_s(s)
        kv = np.stack([ksum(nsum, gaps) for nsum in range(0, 2 * p - 1, 2)])
        pl = legendre_table(q, s, dt)
        return kv[:, None, :] * pl[None, :, :]

    return f


def _spread_modes(core: np.ndarray, prefactor, p: int) -> np.ndarray:
    # core[(m+n)//2, ...] -> full (p, p, ...) with the mode-pair scaling.
    out = np.zeros((p, p) + core.shape[1:], dtype=complex)
    for m in range(p):
        for n in range(p):
            if (m + n) % 2 == 0:
                out[m, n] = prefactor(m, n) * core[(m + n) // 2]
    return out


def precompute_C(ksum, prefactor, disc: Discretization, p: int, tol: float = 1e-13) -> np.ndarray:
    """Current-time array (p, p, q, q): row k integrates the kernel against
    the solution on [0, tau_k], acting on grid values."""
    q, dt, taus = disc.q, disc.dt, disc.taus
    _, tinv = legendre_transform_pair(q, dt)
    ihat = np.empty((p, q, q), dtype=complex)
    for k in range(q):
        f = _stacked_integrand(ksum, p, q, dt, lambda s, tk=taus[k]: tk - s)
        ihat[:, k, :] = adaptive_quad_batch(f, 0.0, taus[k], tol)
    return _spread_modes(ihat @ tinv, prefactor, p)


def lag_integrals(ksum, disc: Discretization, p: int, lags, tol: float = 1e-13) -> np.ndarray:
    """Whole-step kernel integrals at the given backward lags, transformed.

    Entry [s, k, l, i] integrates kernel(lags[i]*dt + tau_k - s') P_l(s')
    over one step, composed with the discrete Legendre transform; s indexes
    the even mode sums. Shared by the local window and the dense reference
    history (which differ only in how far the lags extend).
    """
    q, dt, taus = disc.q, disc.dt, disc.taus
    _, tinv = legendre_transform_pair(q, dt)
    out = np.empty((p, q, q, len(lags)), dtype=complex)
    for i, lag in enumerate(lags):
        off = lag * dt
        for k in range(q):
            f = _stacked_integrand(ksum, p, q, dt, lambda s, o=off + taus[k]: o - s)
            out[:, k, :, i] = adaptive_quad_batch(f, 0.0, dt, tol) @ tinv
    return out


def precompute_L(ksum, prefactor, disc: Discretization, p: int, tol: float = 1e-13) -> np.ndarray:
    """Local-window array (p, p, q, q, M-1) indexed by nu; the step at lag
    M-1-nu is consumed with slice nu. Lags unreachable within N steps stay zero."""
    M, N = disc.M, disc.N
    n_lags = min(M - 1, N - 1)
    core = np.zeros((p, disc.q, disc.q, M - 1), dtype=complex)
    if n_lags > 0:
        lags = np.arange(1, n_lags + 1)
        vals = lag_integrals(ksum, disc, p, lags, tol)
        for i, lag in enumerate(lags):
            core[..., M - 1 - lag] = vals[..., i]
    return _spread_modes(core, prefactor, p)


def precompute_H(soe_k: SoeK, disc: Discretization, phys: Physics, tol: float = 1e-13) -> np.ndarray:
    """History-update array (q, q, n_e): one-step integrals of the decaying
    exponentials against the Legendre basis, transformed. Underflow of the
    damping factor is benign and clamps to zero."""
    q, dt, taus, M = disc.q, disc.dt, disc.taus, disc.M
    _, tinv = legendre_transform_pair(q, dt)
    z = (phys.c / phys.sigma) * soe_k.lambdas  # (n_e,)
    out = np.empty((q, q, soe_k.n_e), dtype=complex)
    for k in range(q):
        off = M * dt + taus[k]

        def f(s: np.ndarray) -> np.ndarray:
            with np.errstate(under="ignore"):
                damp = np.exp(-np.multiply.outer(z, off - s))  # (n_e, ns)
            pl = legendre_table(q, s, dt)
            return damp[:, None, :] * pl[None, :, :]

        hhat = adaptive_quad_batch(f, 0.0, dt, tol)  # (n_e, q_l)
        out[k] = tinv.T @ hhat.T
    return out


def build_system(c_arr: np.ndarray, phys: Physics, disc: Discretization) -> DenseLU:
    """LU of the implicit per-step matrix I + g^2/(2 pi c) * C.

    Flattening is mode-major: row/column index = m*q + k.
    """
    p, q = c_arr.shape[0], disc.q
    if not np.all(np.isfinite(c_arr)):
        raise ValueError("current-time array has non-finite entries")
    kappa = phys.g**2 / (2.0 * math.pi * phys.c)
    a = np.eye(p * q, dtype=complex) + kappa * c_arr.transpose(0, 2, 1, 3).reshape(p * q, p * q)
    return lu_factor(a)


@dataclass
class Scheme:
    """Everything the stepper needs: grid, arrays, factorized system."""

    disc: Discretization
    phys: Physics
    kappa: float
    c_arr: np.ndarray
    l_arr: np.ndarray
    sys_lu: DenseLU
    tmat: np.ndarray
    tinv: np.ndarray
    h_arr: np.ndarray | None = None
    damp: np.ndarray | None = None
    w_k: np.ndarray | None = None
    soe_k: SoeK | None = None

    @property
    def history_active(self) -> bool:
        return self.h_arr is not None

    def history_state_bytes(self) -> int:
        """Memory footprint of the marching state (ring window + compressed
        history); independent of N."""
        p, q, M = self.phys.p, self.disc.q, self.disc.M
        n_e = 0 if self.damp is None else self.damp.size
        return 16 * (M * p * q + p * q * n_e)


def build_scheme(
    bank: KernelBank,
    phys: Physics,
    T: float,
    N: int,
    q: int,
    *,
    delta: float | None = None,
    tol: float = 1e-13,
    soe_k: SoeK | None = None,
) -> Scheme:
    """Assemble the full precomputation for a run of N steps to time T."""
    delta = bank.delta if delta is None else delta
    t_reach = phys.c * T / phys.sigma
    if t_reach > bank.t_max / SQRT2:
        raise ValueError(
            f"kernel argument reaches {t_reach:.3e}, beyond the expansion "
            f"window t_max/sqrt(2) = {bank.t_max / SQRT2:.3e}; rebuild the "
            "kernel bank with a larger t_max"
        )
    M = choose_M(T, N, phys, delta)
    disc = build_grid(T, N, q, M)
    ksum, prefactor = kernel_suite(bank, phys)
    c_arr = precompute_C(ksum, prefactor, disc, phys.p, tol)
    l_arr = precompute_L(ksum, prefactor, disc, phys.p, tol)
    sys_lu = build_system(c_arr, phys, disc)
    tmat, tinv = legendre_transform_pair(q, disc.dt)
    kappa = phys.g**2 / (2.0 * math.pi * phys.c)
    scheme = Scheme(disc, phys, kappa, c_arr, l_arr, sys_lu, tmat, tinv)
    if disc.history_active:
        if soe_k is None:
            soe_k = lift_soe_to_K(bank.soe, phys, bank)
        scheme.h_arr = precompute_H(soe_k, disc, phys, tol)
        scheme.damp = np.exp(-(phys.c / phys.sigma) * soe_k.lambdas * disc.dt)
        scheme.w_k = soe_k.weights
        scheme.soe_k = soe_k
    return scheme
