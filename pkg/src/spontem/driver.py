"""Orchestration: cached kernel builds, scenario runs, convergence and
benchmark harnesses. The command-line layer is a thin wrapper over this."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .backend import get_backend
from .collocation import Scheme, build_scheme
from .config import RunConfig
from .kernels import KernelBank, Physics, build_kernel_bank, load_kernel_bank, save_kernel_bank
from .oracle import timing_probe
from .photon import compute_field_grid, graded_grid, photon_probability
from .soe import SoeJ, build_soe_j
from .sources import SourceTerm, excited_atom_source, translation_error, wavepacket_source
from .stepper import Trajectory, atomic_probability, error_E, solve

__all__ = [
    "RunResult",
    "ConvergenceReport",
    "bank_for",
    "source_for",
    "run_single",
    "run_auto_p",
    "converge",
    "bench_rows",
    "write_trajectory_csv",
    "write_probability_csv",
]


def _bank_cache_path(cache_dir, phys: Physics, n_max: int, t_max: float, tol: float) -> Path:
    key = json.dumps(
        {"n_max": n_max, "om": phys.omega_scaled, "t_max": t_max, "tol": tol},
        sort_keys=True,
    )
    digest = hashlib.sha1(key.encode()).hexdigest()[:16]
    return Path(cache_dir) / f"kernel_bank_{digest}.npz"


def bank_for(phys: Physics, t_max: float, tol: float, cache_dir=None,
             n_max: int | None = None, soe: SoeJ | None = None) -> KernelBank:
    """Build (or load from the cache directory) the kernel bank."""
    n_max = phys.n_max if n_max is None else n_max
    if cache_dir is not None:
        path = _bank_cache_path(cache_dir, phys, n_max, t_max, tol)
        if path.exists():
            try:
                return load_kernel_bank(path, phys, n_max=n_max, t_max=t_max)
            except ValueError:
                pass
    bank = build_kernel_bank(phys, n_max=n_max, t_max=t_max, soe_tol=tol, soe=soe)
    if cache_dir is not None:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        save_kernel_bank(bank, _bank_cache_path(cache_dir, phys, n_max, t_max, tol))
    return bank


def source_for(cfg: RunConfig, phys: Physics | None = None) -> SourceTerm:
    phys = phys or cfg.physics
    if cfg.scenario_kind == "wavepacket":
        return wavepacket_source(cfg.wavepacket, phys)
    return excited_atom_source(phys.p)


@dataclass
class RunResult:
    cfg: RunConfig
    phys: Physics
    bank: KernelBank
    scheme: Scheme
    source: SourceTerm
    trajectory: Trajectory
    timings: dict = field(default_factory=dict)
    p_history: list = field(default_factory=list)

    def manifest(self, backend: str | None = None) -> dict:
        man = {
            "version": __version__,
            "backend": get_backend(backend),
            "config": self.cfg.raw,
            "physics": {
                "c": self.phys.c, "omega": self.phys.omega, "sigma": self.phys.sigma,
                "g": self.phys.g, "p": self.phys.p,
            },
            "discretization": {
                "T": self.scheme.disc.T, "N": self.scheme.disc.N,
                "q": self.scheme.disc.q, "M": self.scheme.disc.M,
            },
            "soe_modes": int(self.scheme.damp.size) if self.scheme.damp is not None else 0,
            "history_state_bytes": self.scheme.history_state_bytes(),
            "timings": self.timings,
        }
        if self.p_history:
            man["auto_p"] = self.p_history
        if self.source.wavepacket is not None:
            man["translation_error"] = translation_error(self.source.wavepacket)
        return man


def run_single(cfg: RunConfig, cache_dir=None, backend: str | None = None,
               phys: Physics | None = None, soe: SoeJ | None = None) -> RunResult:
    phys = phys or cfg.physics
    timings = {}
    t0 = time.perf_counter()
    bank = bank_for(phys, cfg.soe_t_max, cfg.soe_tol, cache_dir, soe=soe)
    timings["bank_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    scheme = build_scheme(bank, phys, cfg.T, cfg.N, cfg.q)
    timings["arrays_s"] = time.perf_counter() - t0
    source = source_for(cfg, phys)
    t0 = time.perf_counter()
    traj = solve(scheme, source, backend=backend)
    timings["solve_s"] = time.perf_counter() - t0
    return RunResult(cfg, phys, bank, scheme, source, traj, timings)


def run_auto_p(cfg: RunConfig, cache_dir=None, backend: str | None = None) -> RunResult:
    """Double the mode count until P_a(T) moves less than the threshold.

    A doubling that leaves P_a(T) bitwise unchanged is treated as
    parity-degenerate (the added modes are identically zero, as for p=1->2
    with even initial data) rather than as convergence.
    """
    soe = build_soe_j(t_max=cfg.soe_t_max, tol=cfg.soe_tol)
    p = cfg.physics.p
    prev = None
    history = []
    while True:
        phys = Physics(cfg.physics.c, cfg.physics.omega, cfg.physics.sigma, cfg.physics.g, p)
        result = run_single(cfg, cache_dir, backend, phys=phys, soe=soe)
        pa_T = atomic_probability(result.trajectory, cfg.T)
        history.append({"p": p, "P_a_T": pa_T})
        if prev is not None and 0.0 < abs(pa_T - prev) < cfg.auto_p.threshold:
            result.p_history = history
            return result
        prev = pa_T
        p *= 2
        if p > cfg.auto_p.p_max:
            raise RuntimeError(
                f"mode count did not converge below p_max={cfg.auto_p.p_max} "
                f"(threshold {cfg.auto_p.threshold:g}); last P_a(T) values: "
                + ", ".join(f"p={h['p']}: {h['P_a_T']:.3e}" for h in history[-3:])
            )


@dataclass
class ConvergenceReport:
    """(dt, E) pairs with a least-squares order fit over the pre-floor range."""

    tstar: float
    n_list: list[int]
    dts: list[float]
    errors: list[float]
    observed_order: float
    floor_estimate: float
    n_fit_points: int


def converge(cfg: RunConfig, tstar: float, n_list, reference_n: int,
             cache_dir=None, backend: str | None = None, floor: float = 1e-10) -> ConvergenceReport:
    n_list = sorted(int(n) for n in n_list)
    if reference_n <= max(n_list):
        raise ValueError("reference_n must be strictly finer than every entry of n_list")
    phys = cfg.physics
    bank = bank_for(phys, cfg.soe_t_max, cfg.soe_tol, cache_dir)
    source = source_for(cfg)
    ref = solve(build_scheme(bank, phys, cfg.T, reference_n, cfg.q), source, backend=backend)
    errors, dts = [], []
    for n in n_list:
        traj = solve(build_scheme(bank, phys, cfg.T, n, cfg.q), source, backend=backend)
        errors.append(error_E(traj, ref, tstar))
        dts.append(cfg.T / n)
    floor_est = max(min(errors), 1e-16)
    ordered = sorted(errors)
    # Only treat the smallest errors as a floor when they stagnate; otherwise
    # every point above the requested floor participates in the fit.
    stagnating = len(ordered) >= 2 and ordered[1] < 3.0 * ordered[0]
    cut = max(floor, 5.0 * floor_est) if stagnating else floor
    keep = [i for i, e in enumerate(errors) if e >= cut]
    if len(keep) >= 2:
        order = float(np.polyfit(np.log([dts[i] for i in keep]),
                                 np.log([errors[i] for i in keep]), 1)[0])
    else:
        order = float("nan")
    return ConvergenceReport(tstar, n_list, dts, errors, order, floor_est, len(keep))


def bench_rows(cfg: RunConfig, n_list, backends, cache_dir=None, repeats: int = 3) -> list[dict]:
    """Timing table at fixed dt: T scales with N so the step count is the
    only thing that changes between rows."""
    phys = cfg.physics
    bank = bank_for(phys, cfg.soe_t_max, cfg.soe_tol, cache_dir)
    source = source_for(cfg)
    dt = cfg.T / cfg.N
    rows = []
    for n in n_list:
        scheme = build_scheme(bank, phys, dt * n, int(n), cfg.q)
        for b in backends:
            probe = timing_probe(bank, scheme, source, backend=b, repeats=repeats)
            rows.append({"N": int(n), "T": dt * n, **probe})
    return rows


def write_trajectory_csv(path, traj: Trajectory) -> None:
    p = traj.p
    times = traj.node_times()
    pa = traj.probability_series()
    header = "t,step,node," + ",".join(
        f"alpha{m}_re,alpha{m}_im" for m in range(p)
    ) + ",P_a"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for j in range(traj.disc.N):
            for k in range(traj.disc.q):
                cells = [f"{times[j, k]:.17g}", str(j + 1), str(k)]
                for m in range(p):
                    z = traj.alpha[j, m, k]
                    cells += [f"{z.real:.17g}", f"{z.imag:.17g}"]
                cells.append(f"{pa[j, k]:.17g}")
                fh.write(",".join(cells) + "\n")


def write_probability_csv(path, traj: Trajectory) -> None:
    times = traj.node_times().ravel()
    pa = traj.probability_series().ravel()
    with open(path, "w") as fh:
        fh.write("t,P_a\n")
        for t, v in zip(times, pa):
            fh.write(f"{t:.17g},{v:.17g}\n")


def field_outputs(result: RunResult, spec) -> tuple:
    """Compute the photon-field grid demanded by the output spec, returning
    (FieldGrid, per-time probability summaries)."""
    x = graded_grid(spec.half_width, spec.inner_half_width, spec.inner_dx, spec.outer_points)
    grid = compute_field_grid(result.trajectory, result.bank, result.phys,
                              result.source, x, spec.times)
    summaries = []
    for i, t in enumerate(grid.times):
        pu = photon_probability(grid.x, grid.u[i])
        pa = atomic_probability(result.trajectory, float(t))
        summaries.append({
            "t": float(t), "P_a": pa, "P_u": pu.value, "total": pa + pu.value,
            "truncation_radius": pu.radius, "edge_density": pu.edge_density,
        })
    return grid, summaries
