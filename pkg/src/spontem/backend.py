"""Stepping-core selection: compiled extension when available, NumPy fallback.

Set SPONTEM_BACKEND=python or =cython to force a choice; forcing cython
when the extension is missing raises at selection time.
"""

from __future__ import annotations

import os

from . import _steppy

try:
    from . import _stepcore
except ImportError:  # pragma: no cover - depends on build environment
    _stepcore = None

__all__ = ["available_backends", "get_backend", "step_module"]


def available_backends() -> list[str]:
    names = ["python"]
    if _stepcore is not None and hasattr(_stepcore, "march_fast"):
        names.insert(0, "cython")
    return names


def get_backend(name: str | None = None) -> str:
    name = name or os.environ.get("SPONTEM_BACKEND")
    avail = available_backends()
    if name is None:
        return avail[0]
    if name not in ("python", "cython"):
        raise ValueError(f"unknown backend {name!r}")
    if name not in avail:
        raise RuntimeError("compiled stepping core requested but not built")
    return name


def step_module(name: str | None = None):
    return _stepcore if get_backend(name) == "cython" else _steppy
