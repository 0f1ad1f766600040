"""Bayesian sparse Gaussian graphical models with lasso selection priors."""

from ._core import (
    adjusted_rand_index,
    confusion,
    fit,
    fit_dp,
    fit_mixture,
    generate,
    kl_loss,
    pd_interval,
    predict,
    simulate_data,
    threshold_edges,
)

__all__ = [
    "adjusted_rand_index",
    "confusion",
    "fit",
    "fit_dp",
    "fit_mixture",
    "generate",
    "kl_loss",
    "pd_interval",
    "predict",
    "simulate_data",
    "threshold_edges",
]
__version__ = "0.1.0"
