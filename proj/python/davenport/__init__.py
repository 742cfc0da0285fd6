"""Davenport series analysis (compiled core)."""

from ._core import (
    Family,
    InvalidInput,
    NumericError,
    ResourceLimit,
    classify_sobolev,
    divisors,
    empirical_spectrum,
    fourier_bound_check,
    fourier_coefficient,
    grid_eval,
    holder_exponent,
    jump_operator,
    maximal_operator,
    mobius,
    partial_sum,
    sigma,
    theoretical_spectrum,
)

__all__ = [
    "Family",
    "InvalidInput",
    "NumericError",
    "ResourceLimit",
    "classify_sobolev",
    "divisors",
    "empirical_spectrum",
    "fourier_bound_check",
    "fourier_coefficient",
    "grid_eval",
    "holder_exponent",
    "jump_operator",
    "maximal_operator",
    "mobius",
    "partial_sum",
    "sigma",
    "theoretical_spectrum",
]
