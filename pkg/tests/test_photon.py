import numpy as np
import pytest

from spontem.collocation import build_scheme
from spontem.kernels import Physics
from spontem.photon import (
    compute_field_grid,
    graded_grid,
    photon_probability,
    reconstruct_scattered,
    total_field,
)
from spontem.sources import Wavepacket, excited_atom_source, free_field, wavepacket_source
from spontem.stepper import solve


@pytest.fixture(scope="module")
def decay_run(bank_p3, physics_default):
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=1)
    scheme = build_scheme(bank_p3, phys, T=5.0, N=25, q=4)
    traj = solve(scheme, excited_atom_source(1), backend="python")
    return phys, traj


def test_zero_at_t0(decay_run, bank_p3):
    phys, traj = decay_run
    x = np.linspace(-3.0, 3.0, 7)
    assert np.all(reconstruct_scattered(traj, bank_p3, phys, x, 0.0) == 0.0)


def test_g_zero_field_vanishes(bank_p3):
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.0, p=1)
    scheme = build_scheme(bank_p3, phys, T=3.0, N=12, q=4)
    traj = solve(scheme, excited_atom_source(1), backend="python")
    x = np.linspace(-5.0, 5.0, 11)
    assert np.all(reconstruct_scattered(traj, bank_p3, phys, x, 2.0) == 0.0)


def test_even_symmetry(decay_run, bank_p3):
    # Even-mode initial data radiates a field symmetric in x.
    phys, traj = decay_run
    x = np.array([0.3, 1.1, 2.7, 4.9, 30.0])
    left = reconstruct_scattered(traj, bank_p3, phys, -x, 4.0)
    right = reconstruct_scattered(traj, bank_p3, phys, x, 4.0)
    assert np.abs(left - right).max() < 1e-14


def test_quadrature_order_self_convergence(decay_run, bank_p3):
    phys, traj = decay_run
    x = np.array([-7.0, -0.9, 0.0, 1.3, 3.3, 40.0])
    base = reconstruct_scattered(traj, bank_p3, phys, x, 5.0)
    finer = reconstruct_scattered(traj, bank_p3, phys, x, 5.0, order=2 * traj.disc.q + 2)
    assert np.abs(base - finer).max() < 1e-8


def test_algebraic_tail_outside_light_cone(decay_run, bank_p3):
    phys, traj = decay_run
    xs = np.array([25.0, 50.0, 100.0, 200.0])  # all beyond c*t = 5
    vals = np.abs(reconstruct_scattered(traj, bank_p3, phys, xs, 5.0))
    assert np.all(vals > 0.0)
    assert np.all(np.diff(vals) < 0.0)


def test_wavepacket_initial_field(bank_p3):
    phys = Physics(c=1.0, omega=1.0, sigma=0.1, g=0.2, p=1)
    wp = Wavepacket(x0=-80.0, beta=12.0, xi0=1.0)
    scheme = build_scheme(bank_p3, phys, T=10.0, N=25, q=4)
    src = wavepacket_source(wp, phys)
    traj = solve(scheme, src, backend="python")
    x = np.linspace(-140.0, -20.0, 4001)
    u = total_field(traj, bank_p3, phys, src, x, 0.0)
    assert np.abs(u - free_field(wp, phys, x, 0.0)).max() < 1e-14
    assert photon_probability(x, u).value == pytest.approx(1.0, abs=1e-6)


def test_probability_caveat_fields():
    x = np.linspace(-10.0, 10.0, 2001)
    u = np.exp(-(x**2)) + 0j
    est = photon_probability(x, u)
    assert est.value == pytest.approx(np.sqrt(np.pi / 2), rel=1e-6)
    assert est.radius == 10.0
    assert est.edge_density == pytest.approx(np.exp(-200.0), rel=1e-10)
    assert photon_probability(x, np.zeros_like(x)).value == 0.0


def test_graded_grid_structure():
    x = graded_grid(half_width=100.0, inner_half_width=10.0, inner_dx=0.1, outer_points=50)
    assert np.all(np.diff(x) > 0)
    assert x[0] == -100.0 and x[-1] == 100.0
    with pytest.raises(ValueError):
        graded_grid(half_width=5.0, inner_half_width=10.0)


def test_field_grid_csv(tmp_path, decay_run, bank_p3):
    phys, traj = decay_run
    src = excited_atom_source(1)
    x = np.linspace(-2.0, 2.0, 5)
    grid = compute_field_grid(traj, bank_p3, phys, src, x, [1.0, 3.0])
    path = tmp_path / "field.csv"
    grid.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x,t,u_re,u_im,scat_re,scat_im"
    assert len(lines) == 1 + 2 * 5
