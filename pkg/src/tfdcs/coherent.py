"""Thermal coherent states of Barut-Girardello and Klauder-Perelomov type.

A state with label ``z`` at inverse temperature ``beta`` has coefficients

    c_n = w^n / sqrt(rho(n)) / sqrt(N),   w = z cosh(theta),

with ``rho`` the kind's structure constants and ``N`` the matching
hypergeometric function of ``|w|^2``. Everything up to the final
exponentiation is done in log-magnitude/phase form.
"""

from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, TruncationError
from .model import (
    DeformedModel,
    Truncation,
    gamma_ratio_log,
    ladder_matrices,
    rho_bg_log,
    rho_bg_log_array,
    rho_kp_log_array,
)
from .quadrature import quad_semiinfinite
from .specfun import ParamLists, hyp_pfq_series, log_meijer_weight
from .thermal import cosh2_theta


class Kind(str, enum.Enum):
    BG = "bg"
    KP = "kp"


def _kind(kind) -> Kind:
    try:
        return Kind(kind)
    except ValueError as exc:
        raise DomainError(f"unknown coherent-state kind {kind!r}") from exc


def norm_params(model: DeformedModel, kind: Kind) -> ParamLists:
    """Parameter lists of the normalisation function for ``kind``."""
    return model.params if _kind(kind) is Kind.BG else model.params.swapped()


def _rho_log_array(model: DeformedModel, kind: Kind, n_max: int) -> np.ndarray:
    if _kind(kind) is Kind.BG:
        return rho_bg_log_array(model, n_max)
    return rho_kp_log_array(model, n_max)


def scaled_label(model: DeformedModel, z: complex, beta: float) -> complex:
    """``z cosh(theta(beta))``."""
    return complex(z) * math.sqrt(cosh2_theta(model, beta))


@functools.lru_cache(maxsize=4096)
def _norm_log(params: ParamLists, x: float) -> float:
    # pure in (params, x); overlap grids reuse the same self-norms many times
    return hyp_pfq_series(params, x).log_abs


def cs_norm_log(model: DeformedModel, kind: Kind, z: complex, beta: float) -> float:
    """Log of the normalisation function at ``|z|^2 cosh^2(theta)``."""
    x = abs(complex(z)) ** 2 * cosh2_theta(model, beta)
    return _norm_log(norm_params(model, kind), x)


@dataclass(frozen=True)
class ThermalCoherentState:
    kind: Kind
    z: complex
    beta: float
    coeffs: np.ndarray
    norm_log: float
    tail_weight: float

    @property
    def n_max(self) -> int:
        return self.coeffs.size - 1


def cs_build(model: DeformedModel, kind: Kind, z: complex, beta: float, trunc: Truncation) -> ThermalCoherentState:
    """Normalised coefficient vector on ``n = 0..n_max``.

    Raises
    ------
    TruncationError
        The discarded weight ``1 - sum |c_n|^2`` is not below ``tail_tol``.
    """
    kind = _kind(kind)
    z = complex(z)
    w = scaled_label(model, z, beta)
    size = trunc.size
    if w == 0:
        c = np.zeros(size, dtype=complex)
        c[0] = 1.0
        c.setflags(write=False)
        return ThermalCoherentState(kind, z, float(beta), c, 0.0, 0.0)
    # modulus and phase kept apart so |c_n| does not depend on arg(z)
    mod = abs(z) * math.sqrt(cosh2_theta(model, beta))
    norm_log = _norm_log(norm_params(model, kind), mod * mod)
    n = np.arange(size, dtype=float)
    log_mag = n * math.log(mod) - 0.5 * _rho_log_array(model, kind, trunc.n_max) - 0.5 * norm_log
    c = np.exp(log_mag) * np.exp(1j * n * cmath.phase(z))
    tail = max(0.0, 1.0 - math.fsum(np.abs(c) ** 2))
    if not tail < trunc.tail_tol:
        raise TruncationError(f"coherent-state tail {tail:.3e} >= tail_tol at n_max={trunc.n_max}, |w|={mod!r}")
    c.setflags(write=False)
    return ThermalCoherentState(kind, z, float(beta), c, norm_log, tail)


def overlap(model: DeformedModel, kind: Kind, z: complex, zp: complex, beta: float) -> complex:
    """``F(conj(z) z' cosh^2) / sqrt(F(|z|^2 cosh^2) F(|z'|^2 cosh^2))``."""
    params = norm_params(model, kind)
    c2 = cosh2_theta(model, beta)
    z, zp = complex(z), complex(zp)
    num = hyp_pfq_series(params, z.conjugate() * zp * c2)
    l1 = _norm_log(params, abs(z) ** 2 * c2)
    l2 = _norm_log(params, abs(zp) ** 2 * c2)
    return num.mantissa * math.exp(num.log_scale - 0.5 * (l1 + l2))


def overlap_series(a: ThermalCoherentState, b: ThermalCoherentState) -> complex:
    """``sum conj(a_n) b_n`` over the shared truncation."""
    m = min(a.coeffs.size, b.coeffs.size)
    return complex(np.vdot(a.coeffs[:m], b.coeffs[:m]))


def eigen_residual(
    model: DeformedModel, z: complex, beta: float, trunc: Truncation, kind: Kind = Kind.BG
) -> float:
    """``|| a- c - z cosh(theta) c ||_2`` without the top (truncation-edge) row.

    Only Barut-Girardello states are annihilation eigenvectors; other kinds
    are rejected.
    """
    if _kind(kind) is not Kind.BG:
        raise DomainError("eigen-relation holds for Barut-Girardello states only")
    st = cs_build(model, Kind.BG, z, beta, trunc)
    lm = ladder_matrices(model, trunc)
    w = scaled_label(model, z, beta)
    r = lm.a_minus @ st.coeffs - w * st.coeffs
    return float(np.linalg.norm(r[:-1]))


@dataclass(frozen=True)
class MomentCheck:
    lhs: float
    rhs: float
    error: float

    @property
    def rel_diff(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.rhs)


def identity_moment_check(
    model: DeformedModel, n: int, beta: float, *, rtol: float = 1e-12, numerical: bool = False
) -> MomentCheck:
    """Moment ``n`` of the resolution-of-identity measure against ``rho_BG(n)``.

    The integral runs over ``r = |z|^2`` with the measure evaluated at
    ``t = r cosh^2(theta)``, so its independence of ``beta`` is a genuine
    numerical statement rather than an identity.
    """
    if n < 0:
        raise DomainError("moment index must be >= 0")
    c2 = cosh2_theta(model, beta)
    log_c2 = math.log(c2)
    base = gamma_ratio_log(model) + log_c2

    def integrand(r):
        t = c2 * r
        return np.exp(base + log_meijer_weight(model.params, t, numerical=numerical) + n * np.log(t))

    res = quad_semiinfinite(integrand, 1e-300, rtol=rtol)
    return MomentCheck(res.value, math.exp(rho_bg_log(model, n)), res.error)


def measure_log_density(model: DeformedModel, x, *, numerical: bool = False):
    """Log density of the measure in the scaled variable ``x = |z|^2 cosh^2``.

    After the angular integral the measure is
    ``Gamma(a/b) pFq(a; b; x) G(x) dx``.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    logf = np.array([hyp_pfq_series(model.params, v).log_abs for v in xs])
    out = gamma_ratio_log(model) + logf + log_meijer_weight(model.params, xs, numerical=numerical)
    return out if np.ndim(x) else float(out[0])


def doot_expect(model: DeformedModel, func: Callable[[float], float], z: complex, beta: float) -> float:
    """Ordered-product substitution rule: ``func(|z|^2 cosh^2(theta))``.

    Stands for the normal-ordered expectation of ``func(A+(beta) A-(beta))``
    in a Barut-Girardello state; not a literal matrix expectation.
    """
    return func(abs(complex(z)) ** 2 * cosh2_theta(model, beta))


@dataclass(frozen=True)
class TwoModeState:
    """Product state on physical (rows) times tilde (columns)."""

    coeffs: np.ndarray
    physical: ThermalCoherentState
    tilde: ThermalCoherentState


def two_mode_build(
    model: DeformedModel, kind: Kind, z: complex, sigma_tilde: complex, beta: float, trunc: Truncation
) -> TwoModeState:
    phys = cs_build(model, kind, z, beta, trunc)
    tilde = cs_build(model, kind, sigma_tilde, beta, trunc)
    m = np.outer(phys.coeffs, tilde.coeffs)
    m.setflags(write=False)
    return TwoModeState(m, phys, tilde)
