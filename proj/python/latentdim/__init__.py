"""Effective dimension and asymptotic scores for Bayesian networks with hidden variables."""

import json as _json

from ._core import (
    DomainError,
    InputError,
    InvalidModel,
    Model,
    StateCapExceeded,
    __version__,
    builtin_names,
    jacobian,
    loglik,
    multinomial_hessian,
    rank_exact,
    sample_data,
    sample_parameters,
)
from . import _core

__all__ = [
    "DomainError",
    "InputError",
    "InvalidModel",
    "Model",
    "StateCapExceeded",
    "__version__",
    "builtin_names",
    "em_fit",
    "jacobian",
    "loglik",
    "multinomial_hessian",
    "rank_exact",
    "regular_rank",
    "reproduce",
    "sample_data",
    "sample_parameters",
    "score",
]


def regular_rank(model, trials=10, seed=0, method=None, parallel=False):
    """Regular Jacobian rank report as a dict (d, d_prime, trials, ...)."""
    return _json.loads(_core._regular_rank(model, trials, seed, method or "", parallel))


def em_fit(model, cases, restarts=5, tolerance=1e-8, max_iterations=500, seed=0):
    return _json.loads(_core._em_fit(model, cases, restarts, tolerance, max_iterations, seed))


def score(model, cases, score="bic", alpha=1.0, seed=0, trials=10):
    """One of ch, bic, bic-latent, cs, cs-corrected."""
    return _json.loads(_core._score(model, cases, score, alpha, seed, trials))


def reproduce(table="all", trials=10, seed=0):
    return _json.loads(_core._reproduce(table, trials, seed))
