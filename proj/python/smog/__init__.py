"""Moment-based estimators for mixtures of spherical Gaussians.

Thin wrapper over the C++ core. All operations are pure functions over
NumPy arrays and are deterministic given their seed arguments.
"""

from smog._core import (
    DegeneracyError,
    EtaCollisionError,
    KurtosisDegeneracyError,
    ParameterError,
    coherence,
    cumulant_hessian,
    estimate_spherical,
    estimate_spherical_exact,
    gamma_threshold,
    ica_estimate,
    learn_gmm,
    learn_gmm_exact,
    match_and_score,
    mc_anticoncentration,
    mc_tail_chi2,
    mc_tail_cubes,
    partition_and_check,
    population_moments,
    pseudo_inverse,
    random_rotation,
    rank_k_approx,
    sample,
    summarize,
    sym_eig,
    validate_model,
)

__all__ = [
    "DegeneracyError",
    "EtaCollisionError",
    "KurtosisDegeneracyError",
    "ParameterError",
    "coherence",
    "cumulant_hessian",
    "estimate_spherical",
    "estimate_spherical_exact",
    "gamma_threshold",
    "ica_estimate",
    "learn_gmm",
    "learn_gmm_exact",
    "match_and_score",
    "mc_anticoncentration",
    "mc_tail_chi2",
    "mc_tail_cubes",
    "partition_and_check",
    "population_moments",
    "pseudo_inverse",
    "random_rotation",
    "rank_k_approx",
    "sample",
    "summarize",
    "sym_eig",
    "validate_model",
]
