"""Special-function kernels.

Log-gamma and Pochhammer symbols, the generalized hypergeometric series, the
Meijer-G weights that solve the Stieltjes moment problem for the deformed
structure constants, and the modified Bessel function used by one of them.

Everything that multiplies gammas or Pochhammer symbols works in log space;
the structure constants overflow binary64 near n = 85 even for the plain
oscillator.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import special

from . import _backend
from .errors import (
    ContourError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    UnsupportedFamilyError,
)
from .quadrature import QuadResult, quad_semiinfinite

__all__ = [
    "MAX_PARAMS",
    "MAX_TERMS",
    "REL_TOL",
    "ParamLists",
    "SeriesResult",
    "bessel_k",
    "hyp_pfq",
    "hyp_pfq_series",
    "log_gamma",
    "log_hyp_pfq",
    "log_meijer_weight",
    "meijer_moment_rhs",
    "meijer_weight",
    "pochhammer_log",
    "quad_semiinfinite",
    "QuadResult",
]

MAX_PARAMS = 8
MAX_TERMS = 10_000
REL_TOL = 1e-17


def _frozen_array(values):
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ParamLists:
    """Upper (``a``) and lower (``b``) parameter lists of a deformation.

    Both lists hold strictly positive reals and have at most
    :data:`MAX_PARAMS` entries.
    """

    a: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    _a_arr: np.ndarray = field(init=False, repr=False, compare=False)
    _b_arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        for name, vals in (("a", a), ("b", b)):
            if len(vals) > MAX_PARAMS:
                raise DomainError(f"at most {MAX_PARAMS} '{name}' parameters are supported, got {len(vals)}")
            for v in vals:
                if not (math.isfinite(v) and v > 0):
                    raise DomainError(f"parameter {name}={v!r} must be finite and > 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_a_arr", _frozen_array(a))
        object.__setattr__(self, "_b_arr", _frozen_array(b))

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    def swapped(self) -> "ParamLists":
        """Return the lists with upper and lower exchanged."""
        return ParamLists(self.b, self.a)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x!r}")
    return math.lgamma(x)


def pochhammer_log(x: float, n: int) -> float:
    """``ln (x)_n = ln Gamma(x + n) - ln Gamma(x)`` for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"pochhammer_log needs x > 0, got {x!r}")
    if n < 0:
        raise DomainError(f"pochhammer_log needs n >= 0, got {n!r}")
    if n == 0:
        return 0.0
    return math.lgamma(x + n) - math.lgamma(x)


class SeriesResult(NamedTuple):
    """A hypergeometric sum stored as ``mantissa * exp(log_scale)``.

    ``tail`` is the geometric tail estimate relative to ``|value|``. Use
    ``log_abs`` when the value may exceed binary64; ``value`` raises
    ``OverflowError`` then.
    """

    mantissa: complex
    log_scale: float
    tail: float
    n_terms: int

    @property
    def value(self) -> complex:
        return self.mantissa * math.exp(self.log_scale)

    @property
    def log_abs(self) -> float:
        return math.log(abs(self.mantissa)) + self.log_scale


def _check_convergent(params: ParamLists, x: complex) -> None:
    p, q = params.p, params.q
    if p > q + 1:
        raise DivergenceError(f"{p}F{q} has zero radius of convergence")
    if p == q + 1 and abs(x) >= 1.0:
        raise DivergenceError(f"{p}F{q} series diverges for |x| = {abs(x)!r} >= 1")


def _cancel_pairs(params: ParamLists) -> ParamLists:
    # equal upper/lower parameters cancel term by term
    b = list(params.b)
    a = []
    for v in params.a:
        if v in b:
            b.remove(v)
        else:
            a.append(v)
    if len(a) == params.p:
        return params
    return ParamLists(tuple(a), tuple(b))


def hyp_pfq_series(
    params: ParamLists,
    x: complex,
    *,
    max_terms: int = MAX_TERMS,
    rel_tol: float = REL_TOL,
    kernel=None,
) -> SeriesResult:
    """Sum ``pFq(a; b; x)`` and report a tail estimate.

    Upper and lower parameters that coincide are cancelled first; when
    nothing is left the result is ``exp(x)`` directly, since summing the
    exponential series for negative ``x`` loses ``|x| / ln 10`` digits.
    Other series at negative ``x`` are summed as they stand; their absolute
    error is about ``eps * |pFq(a; b; |x|)|``.

    Parameters
    ----------
    params : ParamLists
    x : complex
        Argument. Real inputs take an exact-sign path, so results at
        ``conj(x)`` are the conjugates of results at ``x``.
    max_terms : int
        Term budget.
    rel_tol : float
        Stop once the last term and its geometric tail both fall below
        ``rel_tol`` times the running magnitude.
    kernel : callable, optional
        Override the summation kernel (used by the backend parity tests).

    Returns
    -------
    SeriesResult

    Raises
    ------
    DivergenceError
        ``p > q + 1``, or ``p = q + 1`` with ``|x| >= 1``.
    ConvergenceError
        The term budget ran out first.
    """
    x = complex(x)
    if x == 0:
        return SeriesResult(1.0 + 0j, 0.0, 0.0, 1)
    params = _cancel_pairs(params)
    _check_convergent(params, x)
    if params.p == 0 and params.q == 0:
        if x.imag == 0.0:
            return SeriesResult(1.0 + 0j, x.real, 0.0, 0)
        return SeriesResult(cmath.exp(1j * x.imag), x.real, 0.0, 0)
    if x.imag == 0.0:
        sign = 1 if x.real > 0 else -1
        log_abs, phase = math.log(abs(x.real)), 0.0
    else:
        sign = 0
        log_abs, phase = math.log(abs(x)), cmath.phase(x)
    fn = kernel if kernel is not None else _backend.pfq_sum
    sre, sim, scale, tail_log, n_terms, ok = fn(
        params._a_arr, params._b_arr, log_abs, phase, sign, int(max_terms), float(rel_tol)
    )
    if not ok:
        raise ConvergenceError(f"hypergeometric series not converged after {max_terms} terms at x={x!r}")
    mantissa = complex(sre, sim)
    mag = abs(mantissa)
    tail = math.exp(tail_log - scale) / mag if mag > 0 else math.inf
    return SeriesResult(mantissa, scale, tail, n_terms)


def hyp_pfq(params: ParamLists, x: complex) -> complex | float:
    """Generalized hypergeometric function ``pFq(a; b; x)``.

    Returns a float for real ``x`` and a complex otherwise.
    """
    res = hyp_pfq_series(params, x)
    if isinstance(x, complex):
        return res.value
    return res.value.real


def log_hyp_pfq(params: ParamLists, x: float) -> float:
    """``ln pFq(a; b; x)`` for real ``x >= 0`` without overflow."""
    x = float(x)
    if x < 0:
        raise DomainError("log_hyp_pfq needs x >= 0 (the sum can change sign otherwise)")
    return hyp_pfq_series(params, x).log_abs


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind ``K_nu(x)`` for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"bessel_k needs x > 0, got {x!r}")
    return float(special.kv(nu, x))


def _closed_form_log_weight(params: ParamLists, t):
    if params.p == 0 and params.q == 0:
        return -t
    if params.p == 0 and params.q == 1:
        nu = params.b[0] - 1.0
        y = 2.0 * np.sqrt(t)
        return math.log(2.0) + 0.5 * nu * np.log(t) + np.log(special.kve(nu, y)) - y
    return None


def _mp_log_weight(params: ParamLists, t):
    import mpmath

    upper = [[], [v - 1.0 for v in params.a]]
    lower = [[0.0] + [v - 1.0 for v in params.b], []]
    tt = np.asarray(t, dtype=float)
    out = np.empty(tt.shape)
    for idx, val in np.ndenumerate(tt):
        g = mpmath.meijerg(upper, lower, val)
        if not g > 0:
            raise ContourError(f"numerical Meijer-G weight is not positive at t={val!r}")
        out[idx] = float(mpmath.log(g))
    return out if out.ndim else float(out)


_REFERENCE_FAMILIES = (ParamLists(), ParamLists((), (2.0,)), ParamLists((), (3.5,)))
_REFERENCE_POINTS = (0.05, 0.7, 3.0, 12.0)


@functools.lru_cache(maxsize=1)
def _validate_numerical_branch() -> None:
    try:
        import mpmath  # noqa: F401
    except ImportError as exc:
        raise UnsupportedFamilyError("the numerical Meijer-G branch needs mpmath") from exc
    for fam in _REFERENCE_FAMILIES:
        for t in _REFERENCE_POINTS:
            got = _mp_log_weight(fam, t)
            want = float(_closed_form_log_weight(fam, t))
            if not abs(got - want) <= 1e-10 * max(1.0, abs(want)):
                raise ContourError(
                    f"numerical Meijer-G branch disagrees with closed form for {fam} at t={t}: {got} vs {want}"
                )


def log_meijer_weight(params: ParamLists, t, *, numerical: bool = False):
    """Log of the moment-problem weight ``G^{q+1,0}_{p,q+1}(t | a-1 ; 0, b-1)``.

    Closed forms cover ``(p, q) = (0, 0)`` (``e^{-t}``) and ``(0, 1)``
    (``2 t^{(b-1)/2} K_{b-1}(2 sqrt t)``). Other families need
    ``numerical=True``, which evaluates the Mellin-Barnes integral with
    mpmath after checking it against the closed forms.

    Parameters
    ----------
    params : ParamLists
    t : float or ndarray
        Points in ``(0, inf)``.
    numerical : bool
        Allow the numerical branch for families without a closed form.
    """
    tt = np.asarray(t, dtype=float)
    if np.any(~(tt > 0)):
        raise DomainError("meijer weight needs t > 0")
    closed = _closed_form_log_weight(params, tt)
    if closed is None:
        if not numerical:
            raise UnsupportedFamilyError(
                f"no closed-form Meijer weight for (p, q) = ({params.p}, {params.q}); enable the numerical branch"
            )
        _validate_numerical_branch()
        return _mp_log_weight(params, tt)
    if np.ndim(closed) == 0:
        return float(closed)
    return closed


def meijer_weight(params: ParamLists, t, *, numerical: bool = False):
    """Moment-problem weight; see :func:`log_meijer_weight`."""
    return np.exp(log_meijer_weight(params, t, numerical=numerical))


def meijer_moment_rhs(params: ParamLists, s: float) -> float:
    """``ln[Gamma(s) prod Gamma(b_j - 1 + s) / prod Gamma(a_i - 1 + s)]``.

    The closed-form log of the ``s``-th Mellin moment of the weight.
    """
    s = float(s)
    args_up = [s] + [bj - 1.0 + s for bj in params.b]
    args_down = [ai - 1.0 + s for ai in params.a]
    for v in args_up + args_down:
        if not v > 0:
            raise DomainError(f"gamma argument {v!r} <= 0 in Meijer moment at s={s!r}")
    return math.fsum(math.lgamma(v) for v in args_up) - math.fsum(math.lgamma(v) for v in args_down)


def has_closed_form_weight(params: ParamLists) -> bool:
    return params.p == 0 and params.q in (0, 1)
