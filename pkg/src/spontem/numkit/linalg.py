"""Dense complex LU factorization with partial pivoting (LAPACK-backed)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = ["DenseLU", "lu_factor", "lu_solve"]


@dataclass(frozen=True)
class DenseLU:
    """Row-pivoted LU factors of a square complex matrix."""

    lu: np.ndarray
    piv: np.ndarray

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def lu_factor(a: np.ndarray) -> DenseLU:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    with warnings.catch_warnings():
        # Exact singularity surfaces as our LinAlgError below.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a)
    d = np.abs(np.diag(lu))
    if d.min() <= 1e-14 * max(d.max(), 1e-300):
        raise np.linalg.LinAlgError("matrix is singular to working precision")
    return DenseLU(lu, piv)


def lu_solve(f: DenseLU, b: np.ndarray) -> np.ndarray:
    return scipy.linalg.lu_solve((f.lu, f.piv), np.asarray(b, dtype=complex))
