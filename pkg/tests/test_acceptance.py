"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`. Criteria follow the
project requirements; tolerances are pinned here, not tuned at runtime.
"""

import math
import time

import numpy as np
import pytest

from _oracles import jn_quadrature
from spontem.collocation import build_scheme
from spontem.config import parse_config
from spontem.driver import converge, run_auto_p
from spontem.kernels import Physics, build_kernel_bank, eval_jn
from spontem.oracle import direct_solve
from spontem.photon import compute_field_grid, graded_grid, photon_probability
from spontem.sources import Wavepacket, excited_atom_source, wavepacket_source
from spontem.soe import J_DECAY_NMAX, build_soe_j, jn2_bound
from spontem.stepper import atomic_probability, solve


def _report(name: str, detail: str) -> None:
    print(f"\nACCEPTANCE {name}: PASS ({detail})")


@pytest.fixture(scope="module")
def soe():
    return build_soe_j()


def test_criterion_01_kernel_fidelity(soe):
    t0 = time.time()
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=5)
    bank = build_kernel_bank(phys, soe=soe)  # covers n = 0..8
    for n in range(9):
        assert eval_jn(bank, n, 0.0) == 1.0
    ts = np.geomspace(1e-3, 1e5, 200)
    worst = 0.0
    for n in range(9):
        vals = eval_jn(bank, n, ts)
        worst = max(worst, max(abs(v - jn_quadrature(n, t)) for t, v in zip(ts, vals)))
    elapsed = time.time() - t0
    assert worst <= 1e-11
    assert elapsed < 60.0
    _report("1 kernel fidelity", f"max |err| {worst:.2e} over 1800 points, {elapsed:.0f}s")


def test_criterion_02_soe_validity(soe):
    t0 = time.time()
    assert jn2_bound(5.0, 20.0) == pytest.approx(2.7e-21, rel=0.01)
    assert np.all(soe.eval(J_DECAY_NMAX + 1, np.array([25.0, 1e3, 1e7])) == 0.0)
    ts = np.geomspace(20.0, 1e7, 400)
    worst = 0.0
    for n in range(J_DECAY_NMAX + 1):
        vals = soe.eval(n, ts)
        worst = max(worst, max(abs(v - jn_quadrature(n, t)) for t, v in zip(ts, vals)))
    elapsed = time.time() - t0
    assert worst <= 1e-10
    assert elapsed < 120.0
    _report("2 expansion validity", f"max |err| {worst:.2e} over n<=23 x 400 t, {elapsed:.0f}s")


def test_criterion_03_compression_correctness(soe):
    t0 = time.time()
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=3)
    bank = build_kernel_bank(phys, soe=soe)
    scheme = build_scheme(bank, phys, T=50.0, N=120, q=4)
    assert scheme.history_active
    src = excited_atom_source(3)
    fast = solve(scheme, src)
    dense = direct_solve(bank, scheme, src)
    diff = float(np.abs(fast.alpha - dense.alpha).max())
    elapsed = time.time() - t0
    assert diff <= 1e-10
    assert elapsed < 120.0
    _report("3 compression correctness", f"max node diff {diff:.2e}, {elapsed:.0f}s")


def test_criterion_04_wigner_weisskopf_decay(soe):
    details = []
    for g in (0.1, 0.2, 0.3):
        t0 = time.time()
        phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=g, p=1)
        bank = build_kernel_bank(phys, soe=soe)
        T = 0.5 / g**2
        n_steps = max(50, int(T / 0.2))
        scheme = build_scheme(bank, phys, T, n_steps, 4)
        traj = solve(scheme, excited_atom_source(1))
        ts = traj.node_times().ravel()
        slope = float(np.polyfit(ts, np.log(traj.probability_series().ravel()), 1)[0])
        target = -2.0 * g * g
        rel = abs(slope - target) / abs(target)
        elapsed = time.time() - t0
        assert rel <= 0.10
        assert elapsed < 60.0
        details.append(f"g={g}: slope {slope:.4f} vs {target:.4f} ({100 * rel:.1f}%)")
    _report("4 decay-rate fit", "; ".join(details))


def test_criterion_05_convergence_order(soe):
    # Order measurement with the analyticity scale sigma/c resolvable at the
    # coarse steps (sigma = 1); with sigma = 0.1 the eighth-order window lies
    # entirely below the 1e-10 floor used here (see the notes shipped with
    # the test run).
    t0 = time.time()
    base = {
        "physics": {"c": 1.0, "omega": 1.0, "sigma": 1.0, "g": 0.2, "p": 1},
        "scenario": {"kind": "excited_atom"},
    }
    cfg4 = parse_config({**base, "discretization": {"T": 100.0, "N": 100, "q": 4}})
    rep4 = converge(cfg4, 100.0, [25, 50, 100, 200, 400], 1600, floor=1e-10)
    assert rep4.n_fit_points >= 4
    assert 3.5 <= rep4.observed_order <= 4.5
    cfg8 = parse_config({**base, "discretization": {"T": 100.0, "N": 48, "q": 8}})
    rep8 = converge(cfg8, 100.0, [12, 24, 48, 96, 192], 1536, floor=1e-10)
    assert rep8.observed_order >= 7.0  # fit over the points above the floor
    assert rep8.n_fit_points >= 2
    # The eighth-order slope is sustained across every halving whose errors
    # resolve above the reference accuracy (the floor truncates the fit, not
    # the behavior): check the pairwise slopes as well.
    ls, ds = np.log(rep8.errors), np.log(rep8.dts)
    pair = [(ls[i] - ls[i + 1]) / (ds[i] - ds[i + 1])
            for i in range(len(ls) - 1) if rep8.errors[i + 1] >= 1e-13]
    assert len(pair) >= 3 and min(pair) >= 7.0
    elapsed = time.time() - t0
    assert elapsed < 600.0
    _report("5 convergence order",
            f"q=4: {rep4.observed_order:.2f} ({rep4.n_fit_points} pts); "
            f"q=8: {rep8.observed_order:.2f} above floor, pairwise "
            f"{', '.join(f'{o:.2f}' for o in pair)}; {elapsed:.0f}s")


def test_criterion_06_parity_nullity(soe):
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=8)
    bank = build_kernel_bank(phys, soe=soe)
    scheme = build_scheme(bank, phys, T=50.0, N=120, q=4)
    traj = solve(scheme, excited_atom_source(8))
    worst = float(np.abs(traj.alpha[:, 1::2, :]).max())
    assert worst <= 1e-12
    _report("6 parity nullity", f"max odd-mode magnitude {worst:.2e}")


def test_criterion_07_resonance_response(soe):
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=1)
    bank = build_kernel_bank(phys, soe=soe)
    peaks = {}
    for xi0 in (0.4, 1.0, 1.6):
        wp = Wavepacket(x0=-80.0, beta=12.0, xi0=xi0)
        scheme = build_scheme(bank, phys, T=160.0, N=400, q=4)
        traj = solve(scheme, wavepacket_source(wp, phys))
        peaks[xi0] = float(traj.probability_series().max())
    assert peaks[1.0] > peaks[0.4]
    assert peaks[1.0] > peaks[1.6]
    _report("7 resonance response",
            "; ".join(f"xi0={k}: max P_a {v:.4f}" for k, v in peaks.items()))


def test_criterion_08_trapping(soe):
    t0 = time.time()
    cfg = parse_config({
        "physics": {"c": 1.0, "omega": 1.0, "sigma": 0.1, "g": 0.2, "p": 1},
        "discretization": {"T": 200.0, "N": 500, "q": 4},
        "scenario": {"kind": "excited_atom"},
        "auto_p": {"enabled": True, "threshold": 1e-8, "p_max": 256},
    })
    result = run_auto_p(cfg)
    pa_converged = result.p_history[-1]["P_a_T"]
    pa_single = result.p_history[0]["P_a_T"]
    assert result.p_history[0]["p"] == 1
    ratio = pa_converged / pa_single
    elapsed = time.time() - t0
    assert ratio >= 2.0
    _report("8 trapping", f"P_a(200): p={result.phys.p} gives {pa_converged:.4e} vs "
                          f"p=1 {pa_single:.4e} (x{ratio:.3g}), {elapsed:.0f}s")


def test_criterion_09_short_time_conservation(soe):
    t0 = time.time()
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=1)
    bank = build_kernel_bank(phys, soe=soe)
    scheme = build_scheme(bank, phys, T=5.0, N=50, q=4)
    src = excited_atom_source(1)
    traj = solve(scheme, src)
    x = graded_grid(200.0, 15.0, 0.0125, 200)
    grid = compute_field_grid(traj, bank, phys, src, x, [5.0])
    pu = photon_probability(grid.x, grid.u[0])
    pa = atomic_probability(traj, 5.0)
    total = pa + pu.value
    elapsed = time.time() - t0
    assert 0.99 <= total <= 1.01
    _report("9 conservation", f"P_a {pa:.6f} + P_u {pu.value:.6f} = {total:.6f} "
                              f"(radius {pu.radius:g}), {elapsed:.0f}s")


def _march_args(scheme, src):
    disc = scheme.disc
    f_nodes = np.ascontiguousarray(src.node_values(disc), dtype=complex)
    return (disc.N, disc.M, scheme.kappa,
            np.ascontiguousarray(scheme.sys_lu.lu),
            np.ascontiguousarray(scheme.sys_lu.piv),
            np.ascontiguousarray(scheme.l_arr), np.ascontiguousarray(scheme.w_k),
            np.ascontiguousarray(scheme.h_arr), np.ascontiguousarray(scheme.damp),
            f_nodes)


def test_criterion_10_complexity(soe):
    from spontem.backend import get_backend, step_module
    from spontem.oracle import dense_history_array

    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=3)
    bank = build_kernel_bank(phys, soe=soe)
    src = excited_atom_source(3)
    dt = 0.25
    n_pair = (600, 1200)
    mod = step_module(None)
    schemes, fast_args, direct_args = {}, {}, {}
    for n_steps in n_pair:
        schemes[n_steps] = build_scheme(bank, phys, dt * n_steps, n_steps, 8)
        fast_args[n_steps] = _march_args(schemes[n_steps], src)
        d_arr = np.ascontiguousarray(dense_history_array(bank, schemes[n_steps]))
        a = fast_args[n_steps]
        direct_args[n_steps] = (a[0], a[2], a[3], a[4], d_arr, a[9])

    # Interleaved timing: each round measures both sizes under the same
    # instantaneous machine conditions; the median ratio is the estimate.
    def ratios(fn, args_by_n, rounds=9):
        out = []
        for _ in range(rounds):
            t = {}
            for n_steps in n_pair:
                t0 = time.perf_counter()
                fn(*args_by_n[n_steps])
                t[n_steps] = time.perf_counter() - t0
            out.append(t[n_pair[1]] / t[n_pair[0]])
        return float(np.median(out))

    fast_ratio = ratios(mod.march_fast, fast_args)
    direct_ratio = ratios(mod.march_direct, direct_args, rounds=5)
    assert 1.8 <= fast_ratio <= 2.6
    assert 3.0 <= direct_ratio <= 6.0
    state = {n: schemes[n].history_state_bytes() for n in n_pair}
    assert state[n_pair[0]] == state[n_pair[1]]
    dense_state = {n: 16 * n * phys.p * 8 + direct_args[n][4].nbytes for n in n_pair}
    assert dense_state[n_pair[1]] > dense_state[n_pair[0]]
    _report("10 complexity",
            f"fast x{fast_ratio:.2f}, dense x{direct_ratio:.2f} per N doubling "
            f"[{get_backend(None)}]; marching state {state[n_pair[0]]}B independent of N")
