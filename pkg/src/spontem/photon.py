"""Reconstruction of the photon amplitude from the modal trajectory.

Once the atomic coefficients are known, the scattered field is a time
integral of each mode against the j-kernel evaluated along the light cone,
with arguments of either sign (negative arguments via conjugate symmetry).
The integral is taken subinterval by subinterval using the stored Legendre
representation of the solution and Gauss-Legendre quadrature of the smooth
kernel factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .kernels import KernelBank, Physics, eval_jn
from .numkit import gauss_legendre, legendre_table
from .stepper import Trajectory

__all__ = [
    "FieldGrid",
    "PhotonProbability",
    "reconstruct_scattered",
    "total_field",
    "compute_field_grid",
    "photon_probability",
    "graded_grid",
]


def _mode_coefficient(n: int) -> complex:
    # (-i)^n 2^{n/2} Gamma((n+1)/2) / sqrt(n!), via log-Gamma for large n.
    mag = math.exp(0.5 * n * math.log(2.0) + gammaln((n + 1) / 2.0) - 0.5 * gammaln(n + 1.0))
    return (-1j) ** n * mag


def _quad_nodes_for(traj: Trajectory, t: float, order: int):
    """Quadrature nodes/weights on [0, t] split at the trajectory steps,
    with the modal values of the phase-restored amplitudes a_n(s)."""
    disc = traj.disc
    if not 0.0 <= t <= disc.T * (1 + 1e-12):
        raise ValueError(f"t={t} outside trajectory range [0, {disc.T}]")
    if t == 0.0:
        return np.zeros(0), np.zeros(0), np.zeros((traj.p, 0), dtype=complex)
    coeffs = traj.legendre_coeffs()  # (N, p, q)
    j_last = min(disc.N, max(1, int(math.ceil(t / disc.dt))))
    base = gauss_legendre(order, 0.0, disc.dt)
    basis = legendre_table(disc.q, base.nodes, disc.dt)  # (q, order)
    s_list, w_list, a_list = [], [], []
    for j in range(1, j_last + 1):
        lo = (j - 1) * disc.dt
        if j < j_last or abs(t - j * disc.dt) < 1e-12 * disc.T:
            offs, wts = base.nodes, base.weights
            bas = basis
        else:
            part = gauss_legendre(order, 0.0, t - lo)
            offs, wts = part.nodes, part.weights
            bas = legendre_table(disc.q, offs, disc.dt)
        s = lo + offs
        a_list.append((coeffs[j - 1] @ bas) * np.exp(-1j * traj.phys.omega * s)[None, :])
        s_list.append(s)
        w_list.append(wts)
    return np.concatenate(s_list), np.concatenate(w_list), np.concatenate(a_list, axis=1)


def reconstruct_scattered(traj: Trajectory, bank: KernelBank, phys: Physics,
                          x, t: float, order: int | None = None,
                          chunk: int = 512) -> np.ndarray:
    """Scattered photon amplitude u(x,t) - U(x,t) at positions x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    order = 2 * traj.disc.q if order is None else order
    s, w, a_vals = _quad_nodes_for(traj, t, order)
    out = np.zeros(x.size, dtype=complex)
    if s.size == 0 or phys.g == 0.0:
        return out
    two_over_sigma = 2.0 / phys.sigma
    for i in range(0, x.size, chunk):
        xi = x[i : i + chunk, None]
        arg_m = two_over_sigma * (phys.c * (t - s)[None, :] - xi)
        arg_p = two_over_sigma * (phys.c * (t - s)[None, :] + xi)
        acc = np.zeros(xi.size, dtype=complex)
        for n in range(traj.p):
            kv = eval_jn(bank, n, arg_m) + (-1.0) ** n * eval_jn(bank, n, arg_p)
            acc += _mode_coefficient(n) * (kv @ (w * a_vals[n]))
        out[i : i + chunk] = acc
    return out * (-1j * phys.g / (2.0 * math.pi * phys.sigma))


def total_field(traj: Trajectory, bank: KernelBank, phys: Physics, source,
                x, t: float, order: int | None = None) -> np.ndarray:
    """u = U + scattered part; U vanishes for the excited-atom scenario."""
    from .sources import free_field

    scattered = reconstruct_scattered(traj, bank, phys, x, t, order)
    if source.kind == "wavepacket":
        scattered = scattered + free_field(source.wavepacket, phys, np.atleast_1d(x), t)
    return scattered


@dataclass
class FieldGrid:
    """Photon amplitude samples u(x, t) and the scattered part u - U."""

    x: np.ndarray
    times: np.ndarray
    u: np.ndarray          # (n_times, n_x)
    u_minus_U: np.ndarray  # (n_times, n_x)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("x,t,u_re,u_im,scat_re,scat_im\n")
            for i, t in enumerate(self.times):
                for j, x in enumerate(self.x):
                    u, sc = self.u[i, j], self.u_minus_U[i, j]
                    fh.write(f"{x:.17g},{t:.17g},{u.real:.17g},{u.imag:.17g},"
                             f"{sc.real:.17g},{sc.imag:.17g}\n")


def compute_field_grid(traj: Trajectory, bank: KernelBank, phys: Physics,
                       source, x: np.ndarray, times) -> FieldGrid:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    u = np.empty((times.size, x.size), dtype=complex)
    scat = np.empty_like(u)
    for i, t in enumerate(times):
        scat[i] = reconstruct_scattered(traj, bank, phys, x, float(t))
        u[i] = scat[i]
        if source.kind == "wavepacket":
            from .sources import free_field

            u[i] = u[i] + free_field(source.wavepacket, phys, x, float(t))
    return FieldGrid(x, times, u, scat)


@dataclass(frozen=True)
class PhotonProbability:
    """Truncated-grid estimate of the photon probability with its caveat:
    the truncation radius and the density still present at the edge."""

    value: float
    radius: float
    edge_density: float


def photon_probability(x: np.ndarray, u: np.ndarray) -> PhotonProbability:
    """Trapezoid integral of |u|^2 over the (possibly graded) grid."""
    dens = np.abs(u) ** 2
    val = float(np.trapezoid(dens, x))
    return PhotonProbability(val, float(np.abs(x).max()),
                             float(max(dens[0], dens[-1])))


def graded_grid(half_width: float = 200.0, inner_half_width: float = 15.0,
                inner_dx: float = 0.0125, outer_points: int = 200) -> np.ndarray:
    """Symmetric grid, uniform and fine inside the light-cone region and
    geometrically graded outside where the field decays algebraically."""
    if inner_half_width > half_width:
        raise ValueError("inner region exceeds the grid half-width")
    inner = np.arange(-inner_half_width, inner_half_width + 0.5 * inner_dx, inner_dx)
    right = np.geomspace(inner_half_width + inner_dx, half_width, outer_points)
    return np.concatenate([-right[::-1], inner, right])
