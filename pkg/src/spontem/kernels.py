"""Evaluation of the emission memory kernels j_n, k_n and K_mn.

j_n is the normalized half-line Fourier-Gaussian moment; it is tabulated at
Chebyshev points on [0, delta] (sampled by adaptive quadrature) and switches
to a shared sum-of-exponentials expansion beyond. k_n integrates j_n against
the resonance phase: on [0, delta/sqrt(2)] by spectral integration of the
Chebyshev table, beyond by the term-wise closed-form integral of the
exponential expansion. K_mn is k_{m+n} scaled by a mode-pair constant and
vanishes identically for odd m+n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .numkit import ChebInterpolant, adaptive_quad_batch, cheb_fit, spectral_integrate
from .soe import J_DECAY_NMAX, SQRT2, SoeJ, build_soe_j

__all__ = [
    "Physics",
    "KernelBank",
    "kmn_prefactor",
    "build_kernel_bank",
    "eval_jn",
    "eval_kn",
    "eval_Kmn",
    "save_kernel_bank",
    "load_kernel_bank",
]


@dataclass(frozen=True)
class Physics:
    """Model constants: wave speed, resonance frequency, cloud width,
    atom-field coupling, and the number of retained density modes."""

    c: float
    omega: float
    sigma: float
    g: float
    p: int

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("wave speed c must be positive")
        if self.sigma <= 0:
            raise ValueError("cloud width sigma must be positive")
        if self.p < 1:
            raise ValueError("mode count p must be >= 1")

    @property
    def n_max(self) -> int:
        """Highest kernel index needed by the mode coupling: 2(p-1)."""
        return 2 * (self.p - 1)

    @property
    def omega_scaled(self) -> float:
        return self.omega * self.sigma / self.c


def kmn_prefactor(m: int, n: int) -> float:
    """Scaling constant mapping k_{m+n} to K_mn; exactly 0 for odd m+n.

    Uses log-Gamma so large mode sums do not overflow the factorials.
    """
    if (m + n) % 2:
        return 0.0
    sign = (-1.0) ** m * (-1.0) ** ((m + n) // 2)
    logmag = gammaln((m + n + 1) / 2.0) - 0.5 * (
        gammaln(m + 1.0) + gammaln(n + 1.0) - math.log(2.0)
    )
    return sign * math.exp(logmag)


@dataclass
class KernelBank:
    """Tabulated representations of j_n and k_n for n = 0..n_max."""

    n_max: int
    delta: float
    t_max: float
    omega_scaled: float
    cheb_j: list[ChebInterpolant]
    cheb_k: list[ChebInterpolant]
    soe: SoeJ
    # Closed-form continuation of k_n beyond delta/sqrt(2):
    # k_n(t) = ktail_const[n] + ktail_w[n] @ exp(s*t), s = i*om - sqrt(2)*lam.
    ktail_s: np.ndarray = field(repr=False, default=None)
    ktail_w: np.ndarray = field(repr=False, default=None)
    ktail_const: np.ndarray = field(repr=False, default=None)


def _jn_quad(n: int, ts: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Samples of j_n at times ts by batched adaptive quadrature."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    xi_star = math.sqrt(n / 2.0) + 8.0
    pref = 2.0 / math.gamma((n + 1) / 2.0)

    def integrand(xi: np.ndarray) -> np.ndarray:
        with np.errstate(under="ignore"):
            base = pref * xi**n * np.exp(-xi * xi)
        return base[None, :] * np.exp(-1j * np.multiply.outer(ts, xi))

    return adaptive_quad_batch(integrand, 0.0, xi_star, tol)


def _fit_jn(n: int, delta: float, base_nodes: int, tol: float = 1e-13) -> ChebInterpolant:
    nn = base_nodes
    while True:
        itp = cheb_fit(lambda ts: _jn_quad(n, ts, tol), (0.0, delta), nn)
        nodes = itp.nodes
        mids = 0.5 * (nodes[:-1] + nodes[1:])[:: max(1, (nn - 1) // 24)]
        if np.abs(itp(mids) - _jn_quad(n, mids, tol)).max() < 1e-13:
            break
        nn *= 2
        if nn > 4096:
            raise RuntimeError(f"Chebyshev table for kernel index {n} did not converge")
    # The defining normalization makes j_n(0) = 1 exactly; remove the
    # quadrature residue from the t = 0 sample.
    if abs(itp.samples[0] - 1.0) > 1e-12:
        raise RuntimeError(f"j_{n}(0) sample {itp.samples[0]} is not 1 to tolerance")
    itp.samples[0] = 1.0
    return itp


def build_kernel_bank(
    phys: Physics,
    n_max: int | None = None,
    *,
    delta: float = 20.0,
    t_max: float = 1e7,
    soe_tol: float = 1e-12,
    base_nodes: int = 60,
    soe: SoeJ | None = None,
) -> KernelBank:
    """Build all kernel tables needed for mode indices up to n_max.

    A prebuilt SoeJ with matching (delta, t_max) may be supplied to skip
    the expansion construction.
    """
    if n_max is None:
        n_max = phys.n_max
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if soe is None:
        soe = build_soe_j(delta=delta, t_max=t_max, tol=soe_tol)
    elif soe.delta != delta or soe.t_max != t_max:
        raise ValueError("supplied expansion does not match (delta, t_max)")
    om = phys.omega_scaled

    cheb_j = [_fit_jn(n, delta, base_nodes) for n in range(n_max + 1)]
    for n in range(min(n_max, J_DECAY_NMAX) + 1):
        gap = abs(cheb_j[n](delta) - soe.eval(n, delta))
        if gap > 1e-11:
            raise RuntimeError(
                f"small/large-time representations of j_{n} disagree by {gap:.2e} at the split"
            )

    t_split = delta / SQRT2
    cheb_k = []
    for n in range(n_max + 1):
        n_k = cheb_j[n].samples.size + int(math.ceil(10.0 * om)) + 8
        if om > 5.0:
            n_k *= math.ceil(om / 5.0)
        integ = cheb_fit(
            lambda s, n=n: np.exp(1j * om * s) * cheb_j[n](SQRT2 * s),
            (0.0, t_split),
            n_k,
        )
        cheb_k.append(spectral_integrate(integ))

    s = 1j * om - SQRT2 * soe.lambdas
    n_rows = n_max + 1
    ktail_w = np.zeros((n_rows, soe.n_e), dtype=complex)
    ktail_const = np.zeros(n_rows, dtype=complex)
    e_split = np.exp(s * t_split)
    for n in range(n_rows):
        k_split = complex(cheb_k[n](t_split))
        if n <= J_DECAY_NMAX:
            ktail_w[n] = soe.weights[n] / s
            ktail_const[n] = k_split - ktail_w[n] @ e_split
        else:
            ktail_const[n] = k_split
    return KernelBank(
        n_max=n_max, delta=float(delta), t_max=float(t_max), omega_scaled=om,
        cheb_j=cheb_j, cheb_k=cheb_k, soe=soe,
        ktail_s=s, ktail_w=ktail_w, ktail_const=ktail_const,
    )


def eval_jn(bank: KernelBank, n: int, t):
    """j_n(t) for any real t with |t| <= t_max; j_n(-t) = conj(j_n(t))."""
    if not 0 <= n <= bank.n_max:
        raise ValueError(f"kernel index {n} outside stored range 0..{bank.n_max}")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    tf = np.atleast_1d(t).ravel()
    out = np.empty(tf.size, dtype=complex)
    neg = tf < 0.0
    if neg.any():
        out[neg] = np.conj(_eval_jn_pos(bank, n, -tf[neg]))
    pos = ~neg
    if pos.any():
        out[pos] = _eval_jn_pos(bank, n, tf[pos])
    out = out.reshape(np.atleast_1d(t).shape)
    return complex(out[0]) if scalar else out.reshape(t.shape)


def _eval_jn_pos(bank: KernelBank, n: int, t: np.ndarray) -> np.ndarray:
    if t.max(initial=0.0) > bank.t_max * (1.0 + 1e-12):
        raise ValueError(f"t={t.max():.3e} beyond expansion validity t_max={bank.t_max:.3e}")
    out = np.empty(t.size, dtype=complex)
    small = t <= bank.delta
    if small.any():
        out[small] = bank.cheb_j[n](t[small])
    large = ~small
    if large.any():
        out[large] = bank.soe.eval(n, t[large])
    return out


def eval_kn(bank: KernelBank, n: int, t):
    """k_n(t) for 0 <= t <= t_max/sqrt(2)."""
    if not 0 <= n <= bank.n_max:
        raise ValueError(f"kernel index {n} outside stored range 0..{bank.n_max}")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    tf = np.atleast_1d(t).ravel()
    if tf.min(initial=0.0) < 0.0:
        raise ValueError("k_n is defined for t >= 0")
    if tf.max(initial=0.0) > bank.t_max / SQRT2 * (1.0 + 1e-12):
        raise ValueError(
            f"t={tf.max():.3e} beyond continuation validity {bank.t_max / SQRT2:.3e}"
        )
    out = np.empty(tf.size, dtype=complex)
    t_split = bank.delta / SQRT2
    small = tf <= t_split
    if small.any():
        out[small] = bank.cheb_k[n](tf[small])
    large = ~small
    if large.any():
        from .soe import _exp_sum

        out[large] = bank.ktail_const[n] + _exp_sum(tf[large], -bank.ktail_s, bank.ktail_w[n])
    out = out.reshape(np.atleast_1d(t).shape)
    return complex(out[0]) if scalar else out.reshape(t.shape)


def eval_Kmn(bank: KernelBank, m: int, n: int, t):
    """Coupling kernel K_mn(t); identically zero when m+n is odd."""
    if m < 0 or n < 0 or m + n > bank.n_max:
        raise ValueError(f"mode pair ({m},{n}) outside stored range")
    if (m + n) % 2:
        t = np.asarray(t, dtype=float)
        return 0.0 + 0.0j if t.ndim == 0 else np.zeros(t.shape, dtype=complex)
    return kmn_prefactor(m, n) * eval_kn(bank, m + n, t)


def save_kernel_bank(bank: KernelBank, path) -> None:
    """Serialize the bank (tables, expansion, continuation) to an .npz file."""
    meta = {
        "n_max": bank.n_max,
        "delta": bank.delta,
        "t_max": bank.t_max,
        "omega_scaled": bank.omega_scaled,
        "j_nodes": [c.samples.size for c in bank.cheb_j],
        "k_nodes": [c.samples.size for c in bank.cheb_k],
        "soe_achieved_error": bank.soe.achieved_error,
        "soe_a": bank.soe.a,
    }
    arrays = {
        "meta": np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8),
        "soe_lambdas": bank.soe.lambdas,
        "soe_weights": bank.soe.weights,
        "ktail_s": bank.ktail_s,
        "ktail_w": bank.ktail_w,
        "ktail_const": bank.ktail_const,
    }
    for n, c in enumerate(bank.cheb_j):
        arrays[f"j{n}"] = c.samples
    for n, c in enumerate(bank.cheb_k):
        arrays[f"k{n}"] = c.samples
    np.savez_compressed(path, **arrays)


def load_kernel_bank(path, phys: Physics, n_max: int | None = None,
                     delta: float = 20.0, t_max: float = 1e7) -> KernelBank:
    """Load a cached bank; raises ValueError if the key does not match."""
    if n_max is None:
        n_max = phys.n_max
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if (meta["n_max"] < n_max or meta["delta"] != delta or meta["t_max"] != t_max
                or abs(meta["omega_scaled"] - phys.omega_scaled) > 1e-15):
            raise ValueError("cached kernel bank does not match the requested key")
        soe = SoeJ(data["soe_lambdas"], data["soe_weights"], delta, t_max,
                   meta["soe_a"], meta["soe_achieved_error"])
        cheb_j = [ChebInterpolant(0.0, delta, data[f"j{n}"]) for n in range(n_max + 1)]
        t_split = delta / SQRT2
        cheb_k = [ChebInterpolant(0.0, t_split, data[f"k{n}"]) for n in range(n_max + 1)]
        return KernelBank(
            n_max=n_max, delta=delta, t_max=t_max, omega_scaled=meta["omega_scaled"],
            cheb_j=cheb_j, cheb_k=cheb_k, soe=soe,
            ktail_s=data["ktail_s"], ktail_w=data["ktail_w"][: n_max + 1],
            ktail_const=data["ktail_const"][: n_max + 1],
        )
