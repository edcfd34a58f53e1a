"""Dimension laboratory for the affine and continued-fraction disc systems F(d, T), G(d, T)."""

__version__ = "0.1.0"

from .digits import (
    AffineFamily,
    ExplicitPrefix,
    LogFamily,
    PolynomialFamily,
    Shifted,
    SystemSpec,
    example_sequence,
)
from .series import Interval

__all__ = [
    "AffineFamily",
    "ExplicitPrefix",
    "Interval",
    "LogFamily",
    "PolynomialFamily",
    "Shifted",
    "SystemSpec",
    "example_sequence",
    "__version__",
]
