"""Reference solver with dense (uncompressed) history, and timing probes.

The dense path extends the local-window treatment all the way back to
t = 0: whole-step integrals are precomputed for every backward lag up to
N-1 and summed at each step, giving quadratic total cost and a trajectory
that satisfies the same collocation equations as the fast solver. It
shares the kernel evaluators with the fast path (kernel accuracy is
validated separately against quadrature oracles), so the comparison
isolates the history-compression machinery.
"""

from __future__ import annotations

import time

import numpy as np

from . import backend as _backend
from .collocation import Scheme, kernel_suite, lag_integrals, _spread_modes
from .kernels import KernelBank
from .stepper import Trajectory, solve

__all__ = ["dense_history_array", "direct_solve", "timing_probe"]

_N_GUARD = 2000


def dense_history_array(bank: KernelBank, scheme: Scheme, tol: float = 1e-13) -> np.ndarray:
    """Whole-step kernel integrals for every lag 1..N-1, shape (p,p,q,q,N-1).

    Lags inside the local window are copied from the scheme's array (they
    are the same integrals), so only the N-M tail is computed fresh.
    """
    disc, phys = scheme.disc, scheme.phys
    if disc.N > _N_GUARD:
        raise ValueError(f"dense history limited to N <= {_N_GUARD} (quadratic cost)")
    p, q, N, M = phys.p, disc.q, disc.N, disc.M
    d_arr = np.zeros((p, p, q, q, max(N - 1, 0)), dtype=complex)
    n_shared = min(M - 1, N - 1)
    for lag in range(1, n_shared + 1):
        d_arr[..., lag - 1] = scheme.l_arr[..., M - 1 - lag]
    if N - 1 > n_shared:
        ksum, prefactor = kernel_suite(bank, phys)
        lags = np.arange(n_shared + 1, N)
        core = lag_integrals(ksum, disc, p, lags, tol)
        d_arr[..., n_shared:] = _spread_modes(core, prefactor, p)
    return d_arr


def direct_solve(bank: KernelBank, scheme: Scheme, source,
                 backend: str | None = None, tol: float = 1e-13) -> Trajectory:
    """Solve with the dense history; same grid and system as the fast path."""
    disc, phys = scheme.disc, scheme.phys
    f_nodes = np.ascontiguousarray(source.node_values(disc), dtype=complex)
    d_arr = dense_history_array(bank, scheme, tol)
    mod = _backend.step_module(backend)
    alpha = mod.march_direct(
        disc.N, scheme.kappa,
        np.ascontiguousarray(scheme.sys_lu.lu), np.ascontiguousarray(scheme.sys_lu.piv),
        np.ascontiguousarray(d_arr), f_nodes,
    )
    return Trajectory(disc, phys, alpha)


def timing_probe(bank: KernelBank, scheme: Scheme, source,
                 backend: str | None = None, repeats: int = 1) -> dict:
    """Wall-clock of the two marching loops for one configuration.

    Precomputation (kernel tables, arrays, factorization) is excluded:
    the probe measures the stepping cost whose scaling with N is the
    point of comparison. Also reports the marching-state memory: the fast
    solver's ring window plus compressed history (independent of N) and
    the dense solver's full-trajectory dependence.
    """
    disc, phys = scheme.disc, scheme.phys
    f_nodes = np.ascontiguousarray(source.node_values(disc), dtype=complex)
    d_arr = dense_history_array(bank, scheme)
    mod = _backend.step_module(backend)
    lu = np.ascontiguousarray(scheme.sys_lu.lu)
    piv = np.ascontiguousarray(scheme.sys_lu.piv)
    if scheme.history_active:
        w_k, h_mat, damp = (np.ascontiguousarray(scheme.w_k),
                            np.ascontiguousarray(scheme.h_arr),
                            np.ascontiguousarray(scheme.damp))
    else:
        p, q = phys.p, disc.q
        w_k = np.zeros((p, p, 0), dtype=complex)
        h_mat = np.zeros((q, q, 0), dtype=complex)
        damp = np.zeros(0, dtype=complex)
    l_arr = np.ascontiguousarray(scheme.l_arr)

    t_fast = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        mod.march_fast(disc.N, disc.M, scheme.kappa, lu, piv, l_arr, w_k, h_mat, damp, f_nodes)
        t_fast.append(time.perf_counter() - t0)
    t_direct = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        mod.march_direct(disc.N, scheme.kappa, lu, piv, d_arr, f_nodes)
        t_direct.append(time.perf_counter() - t0)
    return {
        "fast": min(t_fast),
        "direct": min(t_direct),
        "fast_state_bytes": scheme.history_state_bytes(),
        "direct_state_bytes": 16 * disc.N * phys.p * disc.q + d_arr.nbytes,
        "backend": _backend.get_backend(backend),
    }
