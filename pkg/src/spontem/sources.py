"""Initial data and source terms for the two experiment scenarios.

Scenario 1 starts from a fully excited atom with no photon present: the
source is the constant initial coefficient vector. Scenario 2 drives the
atom with an incoming modulated Gaussian wavepacket whose free evolution
is, for sufficiently high carrier wavenumber, a rigid translation; the
resonance-phase time integral of the translated packet has a closed form
in erfi, and the source projects it onto the density modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from .kernels import Physics
from .numkit import adaptive_quad_batch, faddeeva_related, hermite_f

__all__ = [
    "Wavepacket",
    "SourceTerm",
    "translation_error",
    "excited_atom_source",
    "free_field",
    "time_integral_U",
    "wavepacket_source",
]

# Beyond this, the translated-packet approximation is too crude to trust.
_TRANSLATION_ERROR_CAP = 1e-3


@dataclass(frozen=True)
class Wavepacket:
    """Incoming photon pulse: center x0, width beta, carrier wavenumber xi0."""

    x0: float
    beta: float
    xi0: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("wavepacket width beta must be positive")


def translation_error(wp: Wavepacket) -> float:
    """Magnitude of the neglected left-moving part of the free evolution.

    Below machine precision when xi0*beta >= 12 (with beta >= 1); the rigid
    translation U(x,t) = u0(x - c t) is then exact for practical purposes.
    """
    return float(erfc(wp.beta * wp.xi0 / 2.0) / (8.0 * math.pi * wp.beta**2) ** 0.25)


def _check_translation(wp: Wavepacket) -> None:
    err = translation_error(wp)
    if err > _TRANSLATION_ERROR_CAP:
        raise ValueError(
            f"translated-packet approximation error {err:.2e} exceeds "
            f"{_TRANSLATION_ERROR_CAP:.0e}; increase xi0*beta"
        )


@dataclass
class SourceTerm:
    """Initial coefficients a_m(0) and the right-hand-side samples f_m(t)."""

    kind: str
    a0: np.ndarray
    _grid: Callable[[object], np.ndarray]
    wavepacket: Wavepacket | None = None

    def node_values(self, disc) -> np.ndarray:
        """f_m at every collocation node, shape (N, p, q)."""
        return self._grid(disc)


def excited_atom_source(p: int) -> SourceTerm:
    """Initially excited atom: a_m(0) = delta_m0, no driving field."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a0 = np.zeros(p, dtype=complex)
    a0[0] = 1.0

    def grid(disc):
        out = np.zeros((disc.N, p, disc.q), dtype=complex)
        out[:, 0, :] = 1.0
        return out

    return SourceTerm("excited_atom", a0, grid)


def free_field(wp: Wavepacket, phys: Physics, x, t):
    """Freely evolved photon amplitude U(x,t) = u0(x - ct)."""
    _check_translation(wp)
    x = np.asarray(x, dtype=float)
    xs = x - phys.c * t
    norm = (2.0 / (math.pi * wp.beta**2)) ** 0.25
    return norm * np.exp(-((xs - wp.x0) ** 2) / wp.beta**2) * np.exp(1j * wp.xi0 * xs)


def time_integral_U(wp: Wavepacket, phys: Physics, x, t):
    """Closed form of int_0^t exp(i omega s) U(x, s) ds.

    x and t broadcast together; the erfi arguments have constant real part
    beta*(omega - xi0 c)/(2c), so overflow only occurs for extreme detuning.
    """
    _check_translation(wp)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    c, om, beta = phys.c, phys.omega, wp.beta
    detune = om - wp.xi0 * c
    r = beta * detune / (2.0 * c)
    pref = (
        1j * math.pi**0.25 * math.sqrt(beta) / (2.0**0.75 * c)
        * np.exp(1j * (wp.xi0 * wp.x0 + om * (x - wp.x0) / c))
        * math.exp(-(beta * detune) ** 2 / (4.0 * c**2))
    )
    e1 = faddeeva_related(r - 1j * (x - wp.x0) / beta).erfi
    e2 = faddeeva_related(r - 1j * (x - wp.x0 - c * t) / beta).erfi
    return pref * (e1 - e2)


def wavepacket_source(wp: Wavepacket, phys: Physics, tol: float = 1e-12,
                      y_cut: float = 8.0, chunk: int = 256) -> SourceTerm:
    """Source term for the photon-pulse scenario: a_m(0) = 0 and
    f_m(t) = -i g * (density projection of the resonance-phase integral).

    The spatial projection integrates over the scaled coordinate y = x/sigma
    on |y| <= y_cut (Gaussian tail below 1e-27); all modes are evaluated
    simultaneously through the Hermite recurrence.
    """
    _check_translation(wp)
    p = phys.p
    a0 = np.zeros(p, dtype=complex)
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)

    def project(times: np.ndarray) -> np.ndarray:
        def f(y: np.ndarray) -> np.ndarray:
            weighted = hermite_f(p - 1, y) * (np.exp(-y * y) * inv_sqrt_pi)[None, :]
            ti = time_integral_U(wp, phys, phys.sigma * y[None, :], times[:, None])
            return weighted[:, None, :] * ti[None, :, :]  # (p, nt, ny)

        return adaptive_quad_batch(f, -y_cut, y_cut, tol)  # (p, nt)

    def grid(disc):
        times = disc.node_times().ravel()
        out = np.empty((p, times.size), dtype=complex)
        for i in range(0, times.size, chunk):
            out[:, i : i + chunk] = project(times[i : i + chunk])
        vals = -1j * phys.g * out
        return vals.reshape(p, disc.N, disc.q).transpose(1, 0, 2)

    return SourceTerm("wavepacket", a0, grid, wavepacket=wp)
