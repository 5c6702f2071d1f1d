import math

import numpy as np
import pytest

from _oracles import j0_closed_form, jn_quadrature, kn_quadrature
from spontem.kernels import (
    Physics,
    build_kernel_bank,
    eval_jn,
    eval_Kmn,
    eval_kn,
    kmn_prefactor,
    load_kernel_bank,
    save_kernel_bank,
)

SQRT2 = math.sqrt(2.0)


def test_physics_validation():
    with pytest.raises(ValueError):
        Physics(c=-1.0, omega=1.0, sigma=0.1, g=0.2, p=1)
    with pytest.raises(ValueError):
        Physics(c=1.0, omega=1.0, sigma=0.0, g=0.2, p=1)
    with pytest.raises(ValueError):
        Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=0)
    assert Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=3).n_max == 4


def test_jn_normalized_at_origin(bank_p3):
    for n in range(bank_p3.n_max + 1):
        assert eval_jn(bank_p3, n, 0.0) == 1.0


def test_kn_zero_at_origin(bank_p3):
    for n in range(bank_p3.n_max + 1):
        assert eval_kn(bank_p3, n, 0.0) == 0.0


def test_j0_closed_form(bank_p3):
    # j_0(t) = e^{-t^2/4} (1 - i erfi(t/2)); cross-checked by quadrature.
    for t in [0.3, 1.0, 2.5, 8.0, 19.9, 20.1, 500.0]:
        cf = j0_closed_form(t)
        assert abs(eval_jn(bank_p3, 0, t) - cf) < 1e-12
    assert abs(j0_closed_form(1.0) - jn_quadrature(0, 1.0)) < 1e-14


def test_conjugate_symmetry_bitwise(bank_p3):
    for t in [0.7, 3.0, 15.0, 50.0]:
        assert eval_jn(bank_p3, 1, -t) == np.conj(eval_jn(bank_p3, 1, t))
    # spot-check the negative branch against quadrature directly
    assert abs(eval_jn(bank_p3, 2, -3.0) - jn_quadrature(2, -3.0)) < 1e-12


def test_jn_above_decay_cutoff_vanishes(bank_n24):
    assert abs(eval_jn(bank_n24, 24, 25.0)) < 1e-16


def test_jn_against_quadrature_oracle(bank_p3):
    for n in (0, 2, 4):
        for t in (1e-3, 0.1, 4.0, 15.0, 20.0, 35.0, 1e3, 1e5):
            assert abs(eval_jn(bank_p3, n, t) - jn_quadrature(n, t)) <= 1e-11


def test_jn_vectorized_matches_scalar(bank_p3):
    # Batched and scalar evaluation may differ by BLAS summation order only.
    ts = np.array([-5.0, 0.0, 3.0, 25.0, 1e4])
    vals = eval_jn(bank_p3, 2, ts)
    assert vals.shape == ts.shape
    for t, v in zip(ts, vals):
        assert v == pytest.approx(eval_jn(bank_p3, 2, float(t)), abs=1e-15)


def test_index_range_errors(bank_p3):
    with pytest.raises(ValueError):
        eval_jn(bank_p3, bank_p3.n_max + 1, 1.0)
    with pytest.raises(ValueError):
        eval_jn(bank_p3, 0, 2e7)
    with pytest.raises(ValueError):
        eval_kn(bank_p3, 0, -1.0)
    with pytest.raises(ValueError):
        eval_kn(bank_p3, 0, 1e7)


def test_kn_derivative_identity(bank_p3):
    # d/dt k_n(t) = e^{i om t} j_n(sqrt(2) t), checked by central differences.
    om = bank_p3.omega_scaled
    h = 1e-4
    for n, t in [(0, 5.0), (2, 9.0), (0, 13.0), (4, 16.0), (0, 1e3), (2, 1e6)]:
        fd = (eval_kn(bank_p3, n, t + h) - eval_kn(bank_p3, n, t - h)) / (2 * h)
        ref = np.exp(1j * om * t) * eval_jn(bank_p3, n, SQRT2 * t)
        assert abs(fd - ref) < 1e-6


def test_kn_continuity_at_split(bank_p3):
    ts = bank_p3.delta / SQRT2
    for n in range(bank_p3.n_max + 1):
        left = eval_kn(bank_p3, n, ts * (1 - 1e-13))
        right = eval_kn(bank_p3, n, ts * (1 + 1e-13))
        assert abs(left - right) <= 1e-11


def test_kn_against_outer_quadrature(bank_p3):
    for n, t in [(0, 1.0), (2, 7.0), (0, 14.0), (4, 30.0), (0, 200.0)]:
        assert abs(eval_kn(bank_p3, n, t) - kn_quadrature(bank_p3, n, t)) < 1e-11


def test_jn_split_agreement(bank_p3):
    for n in range(bank_p3.n_max + 1):
        left = bank_p3.cheb_j[n](bank_p3.delta)
        right = bank_p3.soe.eval(n, bank_p3.delta)
        assert abs(left - right) <= 1e-11


def test_Kmn_parity_null(bank_p3):
    for t in [0.0, 2.0, 17.0, 1e3]:
        assert eval_Kmn(bank_p3, 0, 1, t) == 0.0
        assert eval_Kmn(bank_p3, 1, 2, t) == 0.0


def test_K00_prefactor(bank_p3):
    # Gamma(1/2)/sqrt(1/2) = sqrt(2 pi).
    assert kmn_prefactor(0, 0) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)
    t = 3.0
    assert eval_Kmn(bank_p3, 0, 0, t) == pytest.approx(
        math.sqrt(2 * math.pi) * eval_kn(bank_p3, 0, t)
    )


def test_K00_against_double_quadrature(bank_p3, physics_default):
    # Direct quadrature of the defining resonance integral at one point.
    t = kn_quadrature(bank_p3, 0, 1.3)
    assert abs(eval_Kmn(bank_p3, 0, 0, 1.3) - math.sqrt(2 * math.pi) * t) < 1e-11


def test_Kmn_symmetric(bank_p3):
    for t in [0.5, 5.0, 40.0]:
        assert eval_Kmn(bank_p3, 0, 2, t) == eval_Kmn(bank_p3, 2, 0, t)


def test_prefactor_large_modes_no_overflow():
    v = kmn_prefactor(120, 120)
    assert np.isfinite(v) and v != 0.0


def test_cache_roundtrip(tmp_path, bank_p3, physics_default):
    path = tmp_path / "bank.npz"
    save_kernel_bank(bank_p3, path)
    loaded = load_kernel_bank(path, physics_default)
    ts = np.array([0.0, 1.0, 7.0, 25.0, 1e4])
    for n in range(bank_p3.n_max + 1):
        assert np.array_equal(eval_jn(loaded, n, ts), eval_jn(bank_p3, n, ts))
        assert np.array_equal(eval_kn(loaded, n, ts[:3]), eval_kn(bank_p3, n, ts[:3]))


def test_cache_key_mismatch(tmp_path, bank_p3):
    path = tmp_path / "bank.npz"
    save_kernel_bank(bank_p3, path)
    other = Physics(c=1.0, omega=2.0, sigma=0.1, g=0.2, p=3)
    with pytest.raises(ValueError):
        load_kernel_bank(path, other)
