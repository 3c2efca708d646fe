"""Quantum-inspired regression over sample-and-query access.

The compiled core exposes the length-square sampling structures, the
stochastic coefficient solver, rejection-sampling output access, and the
dense oracle suite used to verify them.
"""

from ._core import (
    HyperParams,
    QueryLedger,
    Rng,
    SampledMatrix,
    SampledVector,
    SparseDescription,
    SpectralBounds,
    choose_s,
    delta_exact,
    derive_hyperparams,
    solve_exact,
    solve_instance,
    sparsify_b,
    svd_values,
    xstar_lower_bound,
)

__all__ = [
    "HyperParams",
    "QueryLedger",
    "Rng",
    "SampledMatrix",
    "SampledVector",
    "SparseDescription",
    "SpectralBounds",
    "choose_s",
    "delta_exact",
    "derive_hyperparams",
    "solve_exact",
    "solve_instance",
    "sparsify_b",
    "svd_values",
    "xstar_lower_bound",
]
