"""Exception hierarchy.

Every error raised by the library derives from :class:`TfdcsError`, so callers
(the CLI in particular) can separate numerical failures from bad input.
"""


class TfdcsError(Exception):
    """Base class for all library errors."""


class DomainError(TfdcsError, ValueError):
    """An argument lies outside the domain of the operation."""


class ModelError(TfdcsError, ValueError):
    """A model or configuration document is malformed or inconsistent."""


class DimensionError(TfdcsError, ValueError):
    """Array lengths do not match the truncation."""


class NumericalError(TfdcsError, ArithmeticError):
    """Base for failures of the numerical machinery itself."""


class DivergenceError(NumericalError):
    """A series or closed form diverges for the requested arguments."""


class ConvergenceError(NumericalError):
    """A convergent procedure did not reach its tolerance within budget."""


class TruncationError(NumericalError):
    """The Fock-space truncation discards more weight than ``tail_tol``."""


class UnsupportedFamilyError(NumericalError):
    """No closed-form Meijer weight exists for this (p, q) and the numerical branch is off."""


class ContourError(NumericalError):
    """The numerical Meijer-G branch failed or disagreed with the closed forms."""


class OutOfRangeError(NumericalError):
    """A ratio was requested where its denominator underflows binary64."""


class UnsupportedSpectrumError(TfdcsError, ValueError):
    """The operation is only defined for a particular spectrum kind."""


class DegenerateLevelsError(DomainError):
    """Two-level input with ``e1 <= e0``."""
