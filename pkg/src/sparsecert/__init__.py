"""Sparse positivity certificates and truncated moment problems for Muntz systems."""

from .core import ExponentVector, Interval, SparsePolynomial, evaluate, evaluate_derivative
from .errors import *  # noqa: F401,F403
from .extremal import KnotSet, count_zeros, nonneg_poly_with_zeros, poly_with_zeros
from .karlin import Decomposition, certify_nonneg, decompose_halfline, decompose_interval
from .moments import (
    AtomicMeasure,
    FeasibilityConfig,
    TruncatedMomentSequence,
    hankel_psd_checks,
    moments_of,
    recover_atoms,
    riesz,
    signed_representation,
    sparse_feasible,
)
from .tsystem import FunctionFamily, SamplingConfig, Verdict, is_et_system, is_t_system

__version__ = "0.1.0"
