"""Foundation numerics: quadrature, Chebyshev/Legendre machinery, special
functions, and a dense complex linear solver."""

from .chebyshev import ChebInterpolant, cheb_fit, spectral_integrate
from .legendre import legendre_eval, legendre_table, legendre_transform_pair
from .linalg import DenseLU, lu_factor, lu_solve
from .quadrature import (
    QuadratureError,
    QuadRule,
    adaptive_quad,
    adaptive_quad_batch,
    gauss_legendre,
)
from .special import ErfFamily, faddeeva_related, gamma_fn, hermite_f

__all__ = [
    "ChebInterpolant",
    "cheb_fit",
    "spectral_integrate",
    "legendre_eval",
    "legendre_table",
    "legendre_transform_pair",
    "DenseLU",
    "lu_factor",
    "lu_solve",
    "QuadratureError",
    "QuadRule",
    "adaptive_quad",
    "adaptive_quad_batch",
    "gauss_legendre",
    "ErfFamily",
    "faddeeva_related",
    "gamma_fn",
    "hermite_f",
]
