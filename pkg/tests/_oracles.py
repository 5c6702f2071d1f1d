"""Independent reference computations used across the test suite.

These deliberately avoid the package's own representations: the kernel
family is integrated directly from its defining half-line integral with
QUADPACK's oscillatory-weight quadrature, and closed forms come from
scipy's Dawson/erf functions.
"""

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import dawsn

warnings.simplefilter("ignore", IntegrationWarning)


def jn_quadrature(n: int, t: float) -> complex:
    """j_n(t) by oscillatory-weight quadrature of the defining integral."""
    xi_star = math.sqrt(n / 2.0) + 8.0
    pref = 2.0 / math.gamma((n + 1) / 2.0)

    def f(x):
        return pref * x**n * np.exp(-x * x)

    kw = dict(epsabs=1e-14, epsrel=1e-13, limit=800)
    with warnings.catch_warnings():
        # Round-off detection at these tolerances is expected and benign.
        warnings.simplefilter("ignore", IntegrationWarning)
        re, _ = quad(f, 0.0, xi_star, weight="cos", wvar=t, **kw)
        im, _ = quad(f, 0.0, xi_star, weight="sin", wvar=t, **kw)
    return re - 1j * im


def j0_closed_form(t: float) -> complex:
    """j_0(t) = exp(-t^2/4) (1 - i erfi(t/2)), stable via Dawson's function."""
    return math.exp(-t * t / 4.0) - 2j * dawsn(t / 2.0) / math.sqrt(math.pi)


def kn_quadrature(bank, n: int, t: float, tol: float = 1e-12) -> complex:
    """k_n(t) by fresh outer quadrature of the resonance-phase integral.

    Uses the bank's j_n evaluator (itself oracle-verified against
    jn_quadrature) as the integrand, so this independently checks the
    spectral-integration and tail-continuation paths.
    """
    from spontem.kernels import eval_jn
    from spontem.numkit import adaptive_quad

    om = bank.omega_scaled
    return adaptive_quad(
        lambda s: np.exp(1j * om * s) * eval_jn(bank, n, math.sqrt(2.0) * s),
        0.0, t, tol,
    )
