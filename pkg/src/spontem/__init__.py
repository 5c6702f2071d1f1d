"""Solver and CLI simulator for single-photon collective spontaneous
emission in a one-dimensional Gaussian atomic cloud."""

from .collocation import Discretization, Scheme, build_scheme
from .kernels import (
    KernelBank,
    Physics,
    build_kernel_bank,
    eval_jn,
    eval_Kmn,
    eval_kn,
    load_kernel_bank,
    save_kernel_bank,
)
from .oracle import direct_solve, timing_probe
from .photon import (
    FieldGrid,
    PhotonProbability,
    compute_field_grid,
    photon_probability,
    reconstruct_scattered,
    total_field,
)
from .soe import SoeJ, SoeK, build_soe_j, jn2_bound, lift_soe_to_K
from .sources import SourceTerm, Wavepacket, excited_atom_source, wavepacket_source
from .stepper import Trajectory, atomic_probability, error_E, solve

__version__ = "0.1.0"

__all__ = [
    "Discretization",
    "Scheme",
    "build_scheme",
    "KernelBank",
    "Physics",
    "build_kernel_bank",
    "eval_jn",
    "eval_Kmn",
    "eval_kn",
    "load_kernel_bank",
    "save_kernel_bank",
    "direct_solve",
    "timing_probe",
    "FieldGrid",
    "PhotonProbability",
    "compute_field_grid",
    "photon_probability",
    "reconstruct_scattered",
    "total_field",
    "SoeJ",
    "SoeK",
    "build_soe_j",
    "jn2_bound",
    "lift_soe_to_K",
    "SourceTerm",
    "Wavepacket",
    "excited_atom_source",
    "wavepacket_source",
    "Trajectory",
    "atomic_probability",
    "error_E",
    "solve",
    "__version__",
]
