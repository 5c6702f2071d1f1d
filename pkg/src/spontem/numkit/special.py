"""Error-function family, Gamma, and normalized Hermite polynomials."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import scipy.special as sp

__all__ = ["ErfFamily", "faddeeva_related", "gamma_fn", "hermite_f"]


class ErfFamily(NamedTuple):
    erf: np.ndarray
    erfc: np.ndarray
    erfi: np.ndarray


def faddeeva_related(z) -> ErfFamily:
    """erf, erfc and erfi at complex z.

    erfi grows like exp(Re(z)^2 - Im(z)^2); arguments with
    (Re z)^2 - (Im z)^2 beyond ~700 overflow double precision and raise.
    """
    z = np.asarray(z, dtype=complex)
    out = ErfFamily(sp.erf(z), sp.erfc(z), sp.erfi(z))
    if not (np.all(np.isfinite(out.erfi)) and np.all(np.isfinite(out.erf))):
        raise OverflowError("erf/erfi overflow: argument outside the representable domain")
    return out


def gamma_fn(x: float) -> float:
    """Gamma(x) for real x > 0."""
    if x <= 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def hermite_f(n_max: int, x) -> np.ndarray:
    """Normalized Hermite values f_n(x) = H_n(x)/sqrt(2^n n!), n = 0..n_max.

    Returned array has shape (n_max+1,) + shape(x). These are orthonormal
    against the unit Gaussian density exp(-x^2)/sqrt(pi).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x
    for m in range(1, n_max):
        out[m + 1] = (x * out[m] - math.sqrt(m / 2.0) * out[m - 1]) / math.sqrt((m + 1) / 2.0)
    return out
