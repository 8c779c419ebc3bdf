"""Deformed-boson thermofield dynamics.

Thermal vacua, Bogoliubov thermal ladder operators, Barut-Girardello and
Klauder-Perelomov thermal coherent states, their resolution-of-identity
measures, and the density operators and quasi-probabilities built on them.
"""

from ._backend import BACKEND
from .errors import (
    ContourError,
    ConvergenceError,
    DegenerateLevelsError,
    DimensionError,
    DivergenceError,
    DomainError,
    ModelError,
    NumericalError,
    OutOfRangeError,
    TfdcsError,
    TruncationError,
    UnsupportedFamilyError,
    UnsupportedSpectrumError,
)

__version__ = "0.1.0"
