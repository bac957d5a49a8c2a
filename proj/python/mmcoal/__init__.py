"""Likelihood inference under multiple-merger coalescents."""

from ._core import (
    ConfigError,
    DomainError,
    LambdaMeasure,
    MutationModel,
    ParseError,
    SizeError,
    csd_prob,
    exact_likelihood,
    importance_sample,
    lambda_rate,
    pac,
    read_data,
    simulate,
    total_coal_rate,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "LambdaMeasure",
    "MutationModel",
    "ParseError",
    "SizeError",
    "csd_prob",
    "exact_likelihood",
    "importance_sample",
    "lambda_rate",
    "pac",
    "read_data",
    "simulate",
    "total_coal_rate",
]
