"""Run configuration: JSON schema, validation, and defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .kernels import Physics
from .sources import Wavepacket

__all__ = ["ConfigError", "FieldSpec", "OutputSpec", "AutoP", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _get(d: dict, path: str, key: str, default=None, required: bool = False):
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}: required field is missing")
        return default
    return d[key]


def _number(d: dict, path: str, key: str, default=None, required: bool = False,
            positive: bool = False) -> float:
    v = _get(d, path, key, default, required)
    if v is None:
        return v
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{path}.{key}: must be positive, got {v}")
    return float(v)


def _integer(d: dict, path: str, key: str, default=None, required: bool = False,
             minimum: int | None = None) -> int:
    v = _get(d, path, key, default, required)
    if v is None:
        return v
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{path}.{key}: must be >= {minimum}, got {v}")
    return v


def _section(d: dict, path: str, key: str, default: dict | None = None) -> dict:
    v = d.get(key, default if default is not None else {})
    if not isinstance(v, dict):
        raise ConfigError(f"{path}.{key}: expected an object")
    return v


@dataclass(frozen=True)
class FieldSpec:
    path: str
    times: tuple[float, ...]
    half_width: float = 200.0
    inner_half_width: float = 15.0
    inner_dx: float = 0.0125
    outer_points: int = 200


@dataclass(frozen=True)
class OutputSpec:
    trajectory: str = "trajectory.csv"
    probability: str = "probability.csv"
    manifest: str = "manifest.json"
    field: FieldSpec | None = None


@dataclass(frozen=True)
class AutoP:
    enabled: bool = False
    threshold: float = 1e-8
    p_max: int = 256


@dataclass(frozen=True)
class RunConfig:
    physics: Physics
    T: float
    N: int
    q: int
    scenario_kind: str
    wavepacket: Wavepacket | None
    soe_t_max: float
    soe_tol: float
    outputs: OutputSpec
    auto_p: AutoP
    raw: dict = field(repr=False, default_factory=dict)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object at the top level")
    phys_d = _section(data, "config", "physics")
    try:
        physics = Physics(
            c=_number(phys_d, "physics", "c", 1.0, positive=True),
            omega=_number(phys_d, "physics", "omega", 1.0),
            sigma=_number(phys_d, "physics", "sigma", 0.1, positive=True),
            g=_number(phys_d, "physics", "g", 0.2),
            p=_integer(phys_d, "physics", "p", 1, minimum=1),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"physics: {exc}") from exc

    disc_d = _section(data, "config", "discretization")
    T = _number(disc_d, "discretization", "T", required=True, positive=True)
    N = _integer(disc_d, "discretization", "N", required=True, minimum=1)
    q = _integer(disc_d, "discretization", "q", 4, minimum=1)

    scen_d = _section(data, "config", "scenario")
    kind = _get(scen_d, "scenario", "kind", "excited_atom")
    wavepacket = None
    if kind == "wavepacket":
        wp_d = _section(scen_d, "scenario", "wavepacket")
        wavepacket = Wavepacket(
            x0=_number(wp_d, "scenario.wavepacket", "x0", -80.0),
            beta=_number(wp_d, "scenario.wavepacket", "beta", 12.0, positive=True),
            xi0=_number(wp_d, "scenario.wavepacket", "xi0", 1.0),
        )
    elif kind != "excited_atom":
        raise ConfigError(
            f"scenario.kind: expected 'excited_atom' or 'wavepacket', got {kind!r}"
        )

    soe_d = _section(data, "config", "soe")
    t_max = _number(soe_d, "soe", "t_max", 1e7, positive=True)
    tol = _number(soe_d, "soe", "tol", 1e-12, positive=True)

    out_d = _section(data, "config", "outputs")
    field_spec = None
    if "field" in out_d and out_d["field"] is not None:
        f_d = _section(out_d, "outputs", "field")
        times = _get(f_d, "outputs.field", "times", required=True)
        if (not isinstance(times, list) or not times
                or not all(isinstance(t, (int, float)) for t in times)):
            raise ConfigError("outputs.field.times: expected a non-empty list of numbers")
        grid_d = _section(f_d, "outputs.field", "grid")
        field_spec = FieldSpec(
            path=_get(f_d, "outputs.field", "path", "field.csv"),
            times=tuple(float(t) for t in times),
            half_width=_number(grid_d, "outputs.field.grid", "half_width", 200.0, positive=True),
            inner_half_width=_number(grid_d, "outputs.field.grid", "inner_half_width", 15.0, positive=True),
            inner_dx=_number(grid_d, "outputs.field.grid", "inner_dx", 0.0125, positive=True),
            outer_points=_integer(grid_d, "outputs.field.grid", "outer_points", 200, minimum=2),
        )
    outputs = OutputSpec(
        trajectory=_get(out_d, "outputs", "trajectory", "trajectory.csv"),
        probability=_get(out_d, "outputs", "probability", "probability.csv"),
        manifest=_get(out_d, "outputs", "manifest", "manifest.json"),
        field=field_spec,
    )

    ap_d = _section(data, "config", "auto_p")
    auto_p = AutoP(
        enabled=bool(_get(ap_d, "auto_p", "enabled", False)),
        threshold=_number(ap_d, "auto_p", "threshold", 1e-8, positive=True),
        p_max=_integer(ap_d, "auto_p", "p_max", 256, minimum=1),
    )
    return RunConfig(physics, T, N, q, kind, wavepacket, t_max, tol, outputs, auto_p, raw=data)


def load_config(path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config: file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from exc
    return parse_config(data)
