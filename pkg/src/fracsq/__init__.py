"""Exact analysis and classification of fractal squares K(N, D)."""

from .core import (
    BudgetExceeded,
    DigitSet,
    DigitSetError,
    LogRatio,
    expand_digits,
    parse_digit_set,
    product_form,
)

__all__ = [
    "BudgetExceeded",
    "DigitSet",
    "DigitSetError",
    "LogRatio",
    "expand_digits",
    "parse_digit_set",
    "product_form",
]

__version__ = "0.1.0"
