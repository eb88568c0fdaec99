"""Exact-rational topological recursion on genus-0 spectral curves, with the
(p,q)-model layer (folded Lax pairs, string series, free energies) and a
loop-equation verification laboratory.

Everything is exact: coefficients are arbitrary-precision rationals, series
carry explicit truncation guarantees, and identity checks are bit-exact.
"""

from .curve import (
    SpectralCurve,
    RamPoint,
    build_curve,
    galois_series,
    omega01_as_ratfunc,
    double_point_scan,
)
from .toprec import CorrelatorTable, TensorForm, kernel_expansion, assemble_qtilde
from .kp import (
    PQModel,
    build_lax,
    build_model_curve,
    chebyshev,
    fold,
    free_energy,
    free_energy_table,
    pq_model,
    spectral_det_check,
    string_series,
    tau_crosscheck,
    validate_pair,
    verify_lax,
)
from . import errors, exactalg, loopeq

__version__ = "0.1.0"

__all__ = [
    "CorrelatorTable",
    "PQModel",
    "RamPoint",
    "SpectralCurve",
    "TensorForm",
    "assemble_qtilde",
    "build_curve",
    "build_lax",
    "build_model_curve",
    "chebyshev",
    "double_point_scan",
    "errors",
    "exactalg",
    "fold",
    "free_energy",
    "free_energy_table",
    "galois_series",
    "kernel_expansion",
    "loopeq",
    "omega01_as_ratfunc",
    "pq_model",
    "spectral_det_check",
    "string_series",
    "tau_crosscheck",
    "validate_pair",
    "verify_lax",
]
