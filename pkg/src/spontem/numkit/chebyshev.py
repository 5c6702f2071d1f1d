"""Chebyshev interpolants with barycentric evaluation and spectral integration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["ChebInterpolant", "cheb_fit", "spectral_integrate"]


def _cheb_nodes(n: int, lo: float, hi: float) -> np.ndarray:
    # Chebyshev points of the second kind, ascending, endpoints included.
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid - half * np.cos(np.arange(n) * np.pi / (n - 1))


def _bary_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[1::2] = -1.0
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


@dataclass
class ChebInterpolant:
    """Polynomial interpolant at second-kind Chebyshev points on [lo, hi]."""

    lo: float
    hi: float
    samples: np.ndarray
    _w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        # Contiguous layout keeps evaluation bitwise reproducible across
        # construction paths (views vs. reloaded arrays hit different BLAS kernels).
        self.samples = np.ascontiguousarray(self.samples, dtype=complex)
        if self.samples.size < 2:
            raise ValueError("need at least 2 samples")
        self._w = _bary_weights(self.samples.size)

    @property
    def nodes(self) -> np.ndarray:
        return _cheb_nodes(self.samples.size, self.lo, self.hi)

    def __call__(self, x) -> np.ndarray:
        """Barycentric evaluation; exact at the interpolation nodes."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xf = np.atleast_1d(x)
        diff = xf[:, None] - self.nodes[None, :]
        hit = diff == 0.0
        on_node = hit.any(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = self._w[None, :] / diff
        if on_node.any():
            # Exact node hit: a one-hot row returns the stored sample.
            ratio[on_node] = hit[on_node]
        out = (ratio @ self.samples) / ratio.sum(axis=1)
        return out[0] if scalar else out.reshape(x.shape)


def cheb_fit(f: Callable[[np.ndarray], np.ndarray], interval, n_nodes: int) -> ChebInterpolant:
    """Interpolate f at n_nodes second-kind Chebyshev points on interval."""
    lo, hi = float(interval[0]), float(interval[1])
    if n_nodes < 2:
        raise ValueError("n_nodes must be >= 2")
    samples = np.asarray(f(_cheb_nodes(n_nodes, lo, hi)), dtype=complex)
    if not np.all(np.isfinite(samples)):
        raise ValueError("integrand returned non-finite samples")
    return ChebInterpolant(lo, hi, samples)


def _coeffs(c: ChebInterpolant) -> np.ndarray:
    # Samples (ascending x) -> Chebyshev-T coefficients via a DCT-I style sum.
    n = c.samples.size
    v = c.samples[::-1].copy()  # index j <-> u_j = cos(j pi/(n-1))
    v[0] *= 0.5
    v[-1] *= 0.5
    j = np.arange(n)
    ct = np.cos(np.outer(j, j) * np.pi / (n - 1))
    a = (2.0 / (n - 1)) * (ct @ v)
    a[0] *= 0.5
    a[-1] *= 0.5
    return a


def _values(a: np.ndarray, lo: float, hi: float) -> ChebInterpolant:
    n = a.size
    j = np.arange(n)
    ct = np.cos(np.outer(j, j) * np.pi / (n - 1))
    v = ct @ a
    return ChebInterpolant(lo, hi, v[::-1])


def spectral_integrate(c: ChebInterpolant) -> ChebInterpolant:
    """Interpolant of the running integral F(t) = int_lo^t f(s) ds."""
    a = _coeffs(c)
    n = a.size
    half = 0.5 * (c.hi - c.lo)
    b = np.zeros(n + 1, dtype=complex)
    for k in range(1, n + 1):
        # T_0 integrates to T_1 outright, so a_0 enters b_1 with weight 1.
        am = 2.0 * a[0] if k == 1 else a[k - 1]
        ap = a[k + 1] if k + 1 < n else 0.0
        b[k] = half * (am - ap) / (2.0 * k)
    k = np.arange(1, n + 1)
    b[0] = -np.sum((-1.0) ** k * b[1:])
    out = _values(b, c.lo, c.hi)
    out.samples[0] = 0.0  # F(lo) = 0 by construction; drop rounding residue
    return out
