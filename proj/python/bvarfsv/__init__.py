"""Bayesian vector autoregressions with factor stochastic volatility."""

from ._core import (
    RandomStream,
    apply_transform,
    build_dataset,
    expanding_window_scores,
    fit,
    generate_coefficients,
    generate_dataset,
    log_predictive_score,
    rmse,
    sample_coefficient_row,
    sample_gig,
    sample_inverse_gaussian,
    select_strategy,
    state_dimension,
)

__all__ = [
    "RandomStream",
    "apply_transform",
    "build_dataset",
    "expanding_window_scores",
    "fit",
    "generate_coefficients",
    "generate_dataset",
    "log_predictive_score",
    "rmse",
    "sample_coefficient_row",
    "sample_gig",
    "sample_inverse_gaussian",
    "select_strategy",
    "state_dimension",
]
