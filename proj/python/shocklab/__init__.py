"""Last passage percolation, TASEP tagged-particle kernels and shock limit laws."""

import json as _json

from ._impl import (
    GeometryError,
    GuardError,
    NumericalError,
    ParameterError,
    dkw_epsilon,
    enumerate_oracle,
    fredholm_cdf,
    kernel_matrix,
    ks_distance,
    last_passage,
    sample_field,
    tw_cdf,
)
from . import _impl


def law_constants(scenario, alpha, beta=0.0):
    return _json.loads(_impl.law_json(scenario, alpha, beta))


def run_product_law(config):
    """config: dict or JSON text with the experiment keys; returns the report as a dict."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_impl.product_law_json(config))


def run_tagged_particle(kind, n, t, alpha, runs, seed=7, M=0):
    return _json.loads(_impl.tagged_particle_json(kind, n, t, alpha, runs, seed, M))


__all__ = [
    "GeometryError", "GuardError", "NumericalError", "ParameterError",
    "dkw_epsilon", "enumerate_oracle", "fredholm_cdf", "kernel_matrix", "ks_distance",
    "last_passage", "sample_field", "tw_cdf",
    "law_constants", "run_product_law", "run_tagged_particle",
]
