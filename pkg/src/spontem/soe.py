"""Sum-of-exponentials compression of the emission kernels at large times.

The oscillatory half-line integral defining the kernel family decays only
algebraically, so its history contribution cannot be truncated. Rotating the
integration path onto a finite vertical segment of height `a` turns the
integrand into a superposition of decaying exponentials exp(-eta*t) with
eta in (0, a]; discretizing that segment with a quadrature rule clustered
geometrically at the origin yields a sum-of-exponentials expansion that is
uniformly accurate for t in [delta, t_max]. The horizontal return path is
negligible for t >= delta by an explicit bound (see jn2_bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .numkit import adaptive_quad_batch, gauss_legendre

if TYPE_CHECKING:  # pragma: no cover
    from .kernels import KernelBank, Physics

__all__ = ["SoeJ", "SoeK", "J_DECAY_NMAX", "jn2_bound", "build_soe_j", "lift_soe_to_K"]

SQRT2 = math.sqrt(2.0)

# Highest kernel index whose magnitude beyond the small/large-time split
# point exceeds double machine precision; higher indices get zero weights.
J_DECAY_NMAX = 23


def jn2_bound(a: float, t: float) -> float:
    """Upper bound 14*exp(2a^2 - a*t) on the discarded horizontal-path term."""
    if a <= 0:
        raise ValueError("contour height a must be positive")
    return 14.0 * math.exp(2.0 * a * a - a * t)


def _exp_sum(t: np.ndarray, lam: np.ndarray, w: np.ndarray, chunk: int = 16384) -> np.ndarray:
    """sum_mu w[mu] exp(-lam[mu] * t), chunked to bound the outer product."""
    flat = np.atleast_1d(t).ravel()
    out = np.empty(flat.size, dtype=complex)
    with np.errstate(under="ignore"):
        for i in range(0, flat.size, chunk):
            out[i : i + chunk] = np.exp(-np.multiply.outer(flat[i : i + chunk], lam)) @ w
    return out.reshape(np.atleast_1d(t).shape)


@dataclass(frozen=True)
class SoeJ:
    """Shared exponents and per-index weights for the j-kernel family.

    j_n(t) ~= sum_mu weights[n, mu] * exp(-lambdas[mu] * t) for
    t in [delta, t_max]; rows exist for n = 0..J_DECAY_NMAX and the
    representation is identically zero for larger n.
    """

    lambdas: np.ndarray
    weights: np.ndarray
    delta: float
    t_max: float
    a: float
    achieved_error: float

    @property
    def n_e(self) -> int:
        return self.lambdas.size

    def eval(self, n: int, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if n > J_DECAY_NMAX:
            return np.zeros(t.shape, dtype=complex)
        return _exp_sum(t, self.lambdas, self.weights[n])

    def dump_json(self, path) -> None:
        """Human-readable dump of exponents/weights for inspection and
        regression baselines."""
        import json

        payload = {
            "delta": self.delta,
            "t_max": self.t_max,
            "a": self.a,
            "n_e": int(self.n_e),
            "achieved_error": self.achieved_error,
            "lambdas": self.lambdas.tolist(),
            "weights": [[[w.real, w.imag] for w in row] for row in self.weights],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)


def _eta_powers(eta: np.ndarray, n_top: int) -> np.ndarray:
    pw = np.empty((n_top + 1, eta.size))
    pw[0] = 1.0
    for n in range(1, n_top + 1):
        pw[n] = pw[n - 1] * eta
    return pw


def build_soe_j(
    delta: float = 20.0,
    t_max: float = 1e7,
    a: float = 5.0,
    tol: float = 1e-12,
    panel_order: int = 16,
) -> SoeJ:
    """Construct the large-time sum-of-exponentials expansion of j_n.

    The rotated-path integral over eta in [0, a] is discretized by
    Gauss-Legendre panels on the dyadic subdivision [a 2^-(k+1), a 2^-k],
    k = 0..ceil(log2(a t_max/delta)), plus the terminal stub [0, a 2^-K];
    modes whose peak contribution over the validity window falls below
    tol/50 are dropped. The result is validated on a 400-point log sweep
    of [delta, t_max] against adaptive quadrature of the rotated-path
    integral.
    """
    if t_max <= delta:
        raise ValueError("t_max must exceed delta")
    guard = jn2_bound(a, delta)
    if guard >= tol:
        raise ValueError(
            f"discarded-path bound {guard:.2e} at t={delta} exceeds tol={tol:.1e}; "
            "increase delta or decrease a"
        )
    n_panels = math.ceil(math.log2(a * t_max / delta))
    edges = a * 2.0 ** -np.arange(n_panels + 1, dtype=float)
    edges = np.concatenate([edges, [0.0]])[::-1]  # ascending, 0 first
    lam, base_w = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rule = gauss_legendre(panel_order, lo, hi)
        lam.append(rule.nodes)
        base_w.append(rule.weights)
    lam = np.concatenate(lam)
    base_w = np.concatenate(base_w)

    ns = np.arange(J_DECAY_NMAX + 1)
    pref = 2.0 * (-1j) ** (ns + 1) / np.array([math.gamma((n + 1) / 2.0) for n in ns])
    with np.errstate(under="ignore"):
        weights = pref[:, None] * base_w[None, :] * _eta_powers(lam, J_DECAY_NMAX) \
            * np.exp(lam * lam)[None, :]
        keep = (np.abs(weights) * np.exp(-lam * delta)[None, :]).max(axis=0) >= tol / 50.0
    lam, weights = lam[keep], weights[:, keep]

    t_val = np.geomspace(delta, t_max, 400)
    with np.errstate(under="ignore"):
        approx = np.exp(-np.outer(lam, t_val)).T @ weights.T  # (nt, n)

    def rotated(eta: np.ndarray) -> np.ndarray:
        with np.errstate(under="ignore"):
            damp = np.exp(eta * eta - np.multiply.outer(t_val, eta))  # (nt, ne)
        return pref[:, None, None] * _eta_powers(eta, J_DECAY_NMAX)[:, None, :] * damp[None]

    truth = adaptive_quad_batch(rotated, 0.0, a, tol / 10.0)  # (n, nt)
    err = float(np.abs(approx.T - truth).max())
    if err > 10.0 * tol:
        raise RuntimeError(
            f"sum-of-exponentials validation error {err:.2e} exceeds {10 * tol:.1e}"
        )
    return SoeJ(lam, weights, float(delta), float(t_max), float(a), err)


@dataclass(frozen=True)
class SoeK:
    """Sum-of-exponentials form of the mode-coupling kernels K_mn.

    K_mn(t) = sum_mu weights[m, n, mu] * exp(-lambdas[mu] * t) for
    t in [delta/sqrt(2), t_max/sqrt(2)]. The last exponent is exactly zero
    (the accumulated constant mode); all others satisfy Re lambda > 0.
    """

    lambdas: np.ndarray
    weights: np.ndarray
    t_lo: float
    t_hi: float

    @property
    def n_e(self) -> int:
        return self.lambdas.size

    def eval(self, m: int, n: int, t) -> np.ndarray:
        return _exp_sum(np.asarray(t, dtype=float), self.lambdas, self.weights[m, n])


def lift_soe_to_K(soe_j: SoeJ, phys: "Physics", bank: "KernelBank") -> SoeK:
    """Lift the j-kernel expansion to the coupling kernels K_mn.

    Integrating each exponential against the resonance phase in closed form
    gives modes with exponents sqrt(2)*lambda_j - i*omega*sigma/c plus one
    constant mode carrying the accumulated value K_mn(delta/sqrt(2)).
    """
    from .kernels import eval_Kmn, kmn_prefactor

    p = phys.p
    om = phys.omega * phys.sigma / phys.c
    s = 1j * om - SQRT2 * soe_j.lambdas  # (n_e,)
    lam = np.concatenate([-s, [0.0]])
    t_lo = soe_j.delta / SQRT2
    e_delta = np.exp(s * t_lo)
    weights = np.zeros((p, p, lam.size), dtype=complex)
    for m in range(p):
        for n in range(m, p):
            if (m + n) % 2:
                continue
            k_at_split = complex(eval_Kmn(bank, m, n, t_lo))
            if m + n <= J_DECAY_NMAX:
                row = kmn_prefactor(m, n) * soe_j.weights[m + n] / s
                weights[m, n, :-1] = row
                weights[m, n, -1] = k_at_split - row @ e_delta
            else:
                weights[m, n, -1] = k_at_split
            weights[n, m] = weights[m, n]
    return SoeK(lam, weights, t_lo, soe_j.t_max / SQRT2)
