"""Radix Selection on Markov sources: simulation and asymptotic theory."""

import json

from ._core import (  # noqa: F401
    ArgumentError,
    DegeneracyError,
    DepthCapError,
    Error,
    MarkovModel,
    ModelError,
    NotPsdError,
    ResourceError,
    __version__,
    cov_asyb,
    cov_uniform,
    kappa,
    lcp,
    mean_asyb,
    mean_markov,
    profile,
    sample_G_asyb,
    sample_G_uniform,
    sample_Z_mu,
    select_ops,
    skew_digits,
    wasserstein1,
)
from . import _core


def quantile_experiment(model, n, reps, seed, grid=(), tolerances=None, threads=0):
    """Normalized quantile process summary as a dict (rows, metadata, ...)."""
    return json.loads(_core._quantile_experiment(model, n, reps, seed, list(grid),
                                                 tolerances or {}, threads))


def grand_average_experiment(model, n, reps, seed, tolerances=None, threads=0):
    return json.loads(_core._grand_average_experiment(model, n, reps, seed, [],
                                                      tolerances or {}, threads))


def worst_case_experiment(model, n, reps, seed, tolerances=None, threads=0):
    return json.loads(_core._worst_case_experiment(model, n, reps, seed, [],
                                                   tolerances or {}, threads))


def run_acceptance(budget="fast", seed=42, only=(), threads=0):
    """List of per-criterion dicts with keys id, title, pass, detail, rows."""
    return json.loads(_core._run_acceptance(budget, seed, list(only), threads))
