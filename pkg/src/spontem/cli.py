"""Command-line simulator: run scenarios, measure convergence, benchmark.

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
failures.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, driver
from .backend import available_backends, get_backend
from .config import ConfigError, load_config
from .numkit import QuadratureError
from .stepper import atomic_probability


def _apply_threads(threads: int | None) -> None:
    if threads is None:
        return
    # Best effort: BLAS pools read these at startup, so setting them early
    # in the process matters most; they are also inherited by child tools.
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(threads)


def _guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except (QuadratureError, np.linalg.LinAlgError, FloatingPointError,
                OverflowError, RuntimeError, ValueError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Simulator for single-photon collective emission in a Gaussian cloud."""


_common = [
    click.option("--config", "config_path", required=True,
                 type=click.Path(exists=False), help="JSON run configuration."),
    click.option("--out", "out_dir", default=".", type=click.Path(), show_default=True,
                 help="Output directory."),
    click.option("--cache", "cache_dir", default=None, type=click.Path(),
                 help="Directory for kernel-table caches."),
    click.option("--threads", default=None, type=int, help="BLAS thread cap."),
    click.option("--backend", default=None, type=click.Choice(["python", "cython"]),
                 help="Stepping core override."),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@main.command()
@_with_common
@_guarded
def run(config_path, out_dir, cache_dir, threads, backend) -> None:
    """Solve one scenario and write trajectory, probability and manifest."""
    _apply_threads(threads)
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.auto_p.enabled:
        result = driver.run_auto_p(cfg, cache_dir, backend)
    else:
        result = driver.run_single(cfg, cache_dir, backend)
    traj = result.trajectory
    paths = []
    tpath = out / cfg.outputs.trajectory
    driver.write_trajectory_csv(tpath, traj)
    paths.append(str(tpath))
    ppath = out / cfg.outputs.probability
    driver.write_probability_csv(ppath, traj)
    paths.append(str(ppath))
    field_summaries = None
    if cfg.outputs.field is not None:
        grid, field_summaries = driver.field_outputs(result, cfg.outputs.field)
        fpath = out / cfg.outputs.field.path
        grid.write_csv(fpath)
        paths.append(str(fpath))
    man = result.manifest(backend)
    man["outputs"] = paths
    if field_summaries is not None:
        man["field_probability"] = field_summaries
    (out / cfg.outputs.manifest).write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
    click.echo(f"p={result.phys.p}  P_a(T)={atomic_probability(traj, cfg.T):.6e}  "
               f"outputs: {', '.join(paths)}")


@main.command()
@_with_common
@click.option("--tstar", type=float, default=None, help="Measurement time (default: T).")
@click.option("--n-list", required=True, help="Comma-separated step counts, e.g. 100,200,400.")
@click.option("--reference-n", required=True, type=int, help="Reference step count.")
@click.option("--floor", type=float, default=1e-10, show_default=True,
              help="Error floor excluded from the order fit.")
@_guarded
def converge(config_path, out_dir, cache_dir, threads, backend,
             tstar, n_list, reference_n, floor) -> None:
    """Self-convergence study against a finer reference run."""
    _apply_threads(threads)
    cfg = load_config(config_path)
    ns = [int(s) for s in n_list.split(",") if s.strip()]
    tstar = cfg.T if tstar is None else tstar
    report = driver.converge(cfg, tstar, ns, reference_n, cache_dir, backend, floor)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "convergence.csv"
    with open(csv_path, "w") as fh:
        fh.write("N,dt,E\n")
        for n, dt, e in zip(report.n_list, report.dts, report.errors):
            fh.write(f"{n},{dt:.17g},{e:.17g}\n")
    (out / "convergence.json").write_text(json.dumps({
        "tstar": report.tstar, "n_list": report.n_list, "dts": report.dts,
        "errors": report.errors, "observed_order": report.observed_order,
        "floor_estimate": report.floor_estimate, "n_fit_points": report.n_fit_points,
    }, indent=2) + "\n")
    for n, dt, e in zip(report.n_list, report.dts, report.errors):
        click.echo(f"N={n:6d}  dt={dt:10.4e}  E={e:.6e}")
    click.echo(f"observed order {report.observed_order:.2f} "
               f"({report.n_fit_points} points above floor)")


@main.command()
@_with_common
@click.option("--n-list", required=True, help="Comma-separated step counts; T scales with N.")
@click.option("--backends", default="active", type=click.Choice(["active", "both"]),
              show_default=True, help="Benchmark the active stepping core or both.")
@click.option("--repeats", default=3, show_default=True, type=int)
@_guarded
def bench(config_path, out_dir, cache_dir, threads, backend,
          n_list, backends, repeats) -> None:
    """Time the fast and dense-history marching loops at fixed dt."""
    _apply_threads(threads)
    cfg = load_config(config_path)
    ns = [int(s) for s in n_list.split(",") if s.strip()]
    use = available_backends() if backends == "both" else [get_backend(backend)]
    rows = driver.bench_rows(cfg, ns, use, cache_dir, repeats)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "bench.csv"
    with open(csv_path, "w") as fh:
        fh.write("N,T,backend,fast_s,direct_s,fast_state_bytes,direct_state_bytes\n")
        for r in rows:
            fh.write(f"{r['N']},{r['T']:.17g},{r['backend']},{r['fast']:.6e},"
                     f"{r['direct']:.6e},{r['fast_state_bytes']},{r['direct_state_bytes']}\n")
    for r in rows:
        click.echo(f"N={r['N']:6d} [{r['backend']:>6s}]  fast={r['fast']:.4e}s  "
                   f"direct={r['direct']:.4e}s  state={r['fast_state_bytes']}B")
    click.echo(f"wrote {csv_path}")


@main.command()
@_with_common
@_guarded
def field(config_path, out_dir, cache_dir, threads, backend) -> None:
    """Solve and reconstruct the photon field on the configured grid."""
    _apply_threads(threads)
    cfg = load_config(config_path)
    if cfg.outputs.field is None:
        raise ConfigError("outputs.field: required for the field command")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = driver.run_single(cfg, cache_dir, backend)
    grid, summaries = driver.field_outputs(result, cfg.outputs.field)
    fpath = out / cfg.outputs.field.path
    grid.write_csv(fpath)
    for s in summaries:
        click.echo(f"t={s['t']:10.4f}  P_a={s['P_a']:.6f}  P_u={s['P_u']:.6f}  "
                   f"sum={s['total']:.6f}  (grid radius {s['truncation_radius']:g}, "
                   f"edge density {s['edge_density']:.2e})")
    click.echo(f"wrote {fpath}")


if __name__ == "__main__":
    main()
